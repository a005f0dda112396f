//! Deterministic primality by trial division; inputs here are desk-scale.

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n < 4 {
        return true;
    }
    if n.is_multiple_of(2) {
        return false;
    }
    let mut f = 3u64;
    while f <= n / f {
        if n.is_multiple_of(f) {
            return false;
        }
        f += 2;
    }
    true
}

/// All primes `<= limit`, ascending.
pub fn primes_up_to(limit: u64) -> Vec<u64> {
    (2..=limit).filter(|&n| is_prime(n)).collect()
}

/// Least prime `>= n`.
pub fn next_prime_at_least(n: u64) -> u64 {
    let mut c = n.max(2);
    while !is_prime(c) {
        c += 1;
    }
    c
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_primes() {
        assert_eq!(primes_up_to(30), vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29]);
        assert!(!is_prime(0));
        assert!(!is_prime(1));
        assert!(!is_prime(25));
        assert!(is_prime(7919));
        assert_eq!(next_prime_at_least(41), 41);
        assert_eq!(next_prime_at_least(42), 43);
        assert_eq!(next_prime_at_least(0), 2);
    }
}
