use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

/// `⌊√n⌋` by Newton iteration from above. Panics on negative input.
pub fn isqrt(n: &BigInt) -> BigInt {
    assert!(!n.is_negative(), "isqrt of negative integer");
    if n < &BigInt::from(2) {
        return n.clone();
    }
    // 2^ceil(bits/2) ≥ √n
    let mut x: BigInt = BigInt::one() << n.bits().div_ceil(2);
    loop {
        let y: BigInt = (&x + n / &x) >> 1;
        if y >= x {
            return x;
        }
        x = y;
    }
}

pub fn is_perfect_square(n: &BigInt) -> bool {
    if n.is_negative() {
        return false;
    }
    if n.is_zero() {
        return true;
    }
    let r = isqrt(n);
    &r * &r == *n
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_values() {
        assert_eq!(isqrt(&BigInt::from(125)), BigInt::from(11));
        assert_eq!(isqrt(&BigInt::from(1_000_000)), BigInt::from(1000));
        assert_eq!(isqrt(&BigInt::from(0)), BigInt::from(0));
        assert_eq!(isqrt(&BigInt::from(1)), BigInt::from(1));
        assert_eq!(isqrt(&BigInt::from(3)), BigInt::from(1));
    }

    #[test]
    fn defining_inequality_exhaustive() {
        for n in 0u64..20_000 {
            let b = BigInt::from(n);
            let r = isqrt(&b);
            assert!(&r * &r <= b);
            assert!((&r + 1) * (&r + 1) > b);
        }
    }

    #[test]
    fn around_large_squares() {
        let base: BigInt = BigInt::from(10).pow(30) + 12345;
        let sq = &base * &base;
        assert_eq!(isqrt(&sq), base);
        assert_eq!(isqrt(&(&sq - 1)), &base - 1);
        assert_eq!(isqrt(&(&sq + 1)), base);
        assert!(is_perfect_square(&sq));
        assert!(!is_perfect_square(&(&sq + 1)));
    }
}
