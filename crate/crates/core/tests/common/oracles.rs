//! Test-side oracles, written independently of the library.

use std::collections::HashMap;

/// All words with the given letter content.
pub fn words(content: &[u32]) -> Vec<Vec<u8>> {
    let total: u32 = content.iter().sum();
    if total == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for (i, &c) in content.iter().enumerate() {
        if c > 0 {
            let mut rest = content.to_vec();
            rest[i] -= 1;
            for mut w in words(&rest) {
                w.insert(0, i as u8);
                out.push(w);
            }
        }
    }
    out
}

/// Expansion of the left-normed bracket `[..[[x_{w1}, x_{w2}], x_{w3}]..]`.
pub fn left_normed(w: &[u8]) -> HashMap<Vec<u8>, i64> {
    let mut acc: HashMap<Vec<u8>, i64> = HashMap::from([(vec![w[0]], 1)]);
    for &a in &w[1..] {
        let mut next: HashMap<Vec<u8>, i64> = HashMap::new();
        for (u, c) in acc {
            let mut ua = u.clone();
            ua.push(a);
            *next.entry(ua).or_default() += c;
            let mut au = vec![a];
            au.extend(&u);
            *next.entry(au).or_default() -= c;
        }
        acc = next;
    }
    acc
}

fn mobius(n: u32) -> i64 {
    let (mut n, mut k, mut sign) = (n, 2, 1);
    while k * k <= n {
        if n % k == 0 {
            n /= k;
            if n % k == 0 {
                return 0;
            }
            sign = -sign;
        }
        k += 1;
    }
    if n > 1 {
        -sign
    } else {
        sign
    }
}

fn factorial(n: u32) -> i64 {
    (1..=n as i64).product()
}

/// Multigraded Witt formula `(1/|λ|) Σ_{d | gcd} μ(d) (|λ|/d)! / Π (λ_i/d)!`.
pub fn witt_formula(content: &[u32]) -> i64 {
    let total: u32 = content.iter().sum();
    let g = content.iter().fold(0, |a, &b| num::integer::gcd(a, b));
    let mut s = 0;
    for d in 1..=g {
        if g % d == 0 {
            let multinom = factorial(total / d) / content.iter().map(|&c| factorial(c / d)).product::<i64>();
            s += mobius(d) * multinom;
        }
    }
    s / total as i64
}
