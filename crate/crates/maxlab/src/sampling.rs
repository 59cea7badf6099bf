//! Low-discrepancy sampling used for geometric sweeps.
//!
//! Halton points are deterministic and nested: the first `m` points of a
//! sample of size `n > m` coincide with the sample of size `m`, which keeps
//! constraint sets monotone under refinement.

use crate::domain::Domain;
use crate::geom::{Rect, Vec2};

/// Van der Corput radical inverse in the given base.
pub fn radical_inverse(mut i: u64, base: u64) -> f64 {
    let inv = 1.0 / base as f64;
    let mut x = 0.0;
    let mut f = inv;
    while i > 0 {
        x += (i % base) as f64 * f;
        i /= base;
        f *= inv;
    }
    x
}

/// 2-D Halton point (bases 2 and 3), index starting from 1.
pub fn halton(i: u64) -> (f64, f64) {
    (radical_inverse(i, 2), radical_inverse(i, 3))
}

/// First `count` Halton points of `window` that land inside the domain.
/// Enumeration order is fixed, so sample sets are nested in `count`.
pub fn interior_points(dom: &Domain, window: Rect, count: usize) -> Vec<Vec2> {
    let mut out = Vec::with_capacity(count);
    let mut i = 1u64;
    let budget = 1_000_000u64;
    while out.len() < count && i < budget {
        let (u, v) = halton(i);
        let p = window.lerp(u, v);
        if dom.contains(p) {
            out.push(p);
        }
        i += 1;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn halton_is_in_unit_square() {
        for i in 1..200 {
            let (u, v) = halton(i);
            assert!((0.0..1.0).contains(&u) && (0.0..1.0).contains(&v));
        }
    }

    #[test]
    fn halton_prefixes_are_nested() {
        let a: Vec<_> = (1..=10).map(halton).collect();
        let b: Vec<_> = (1..=20).map(halton).collect();
        assert_eq!(&a[..], &b[..10]);
    }
}
