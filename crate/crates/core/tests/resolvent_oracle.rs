//! Generated resolvents, specialized at integer coefficients, against the
//! Euclidean-remainder resultant over the rationals.

use hornopt::{gen_res, Polynomial, ResolventSpec};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Coefficients low to high, trailing zeros trimmed.
type Upoly = Vec<BigRational>;

fn trim(mut p: Upoly) -> Upoly {
    while p.last().is_some_and(Zero::is_zero) {
        p.pop();
    }
    p
}

fn rem(f: &Upoly, g: &Upoly) -> Upoly {
    let mut r = f.clone();
    let lead = g.last().unwrap().clone();
    while r.len() >= g.len() {
        let shift = r.len() - g.len();
        let q = r.last().unwrap() / &lead;
        for (i, gc) in g.iter().enumerate() {
            r[shift + i] -= &q * gc;
        }
        r.pop();
        r = trim(r);
    }
    r
}

/// `Res(f, g)` for `deg f = m`, `deg g = n`, both with nonzero leading coefficient.
fn resultant(f: &Upoly, g: &Upoly) -> BigRational {
    let m = f.len() - 1;
    let n = g.len() - 1;
    if n == 0 {
        return num_traits::pow(g[0].clone(), m);
    }
    let r = rem(f, g);
    if r.is_empty() {
        return BigRational::zero();
    }
    let k = r.len() - 1;
    let sign = if (m * n) % 2 == 1 { -BigRational::one() } else { BigRational::one() };
    sign * num_traits::pow(g[n].clone(), m - k) * resultant(g, &r)
}

fn specialize(p: &Polynomial, a: &[BigInt], b: &[BigInt]) -> BigInt {
    let point: Vec<BigInt> = p
        .vars()
        .ids()
        .map(|v| {
            let name = p.vars().name(v);
            let i: usize = name[1..].parse().unwrap();
            if name.starts_with('a') { a[i].clone() } else { b[i].clone() }
        })
        .collect();
    p.eval(&point)
}

#[test]
fn matches_euclidean_resultant() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for m in 1..=6u32 {
        for n in 1..=(7 - m).min(m) {
            let res = gen_res(ResolventSpec::new(m, n).unwrap()).unwrap();
            for _ in 0..10 {
                let mut draw = |len: u32| -> Vec<BigInt> {
                    let mut v: Vec<BigInt> = (0..=len).map(|_| BigInt::from(rng.random_range(-9..=9))).collect();
                    if v[len as usize].is_zero() {
                        v[len as usize] = BigInt::from(rng.random_range(1..=9));
                    }
                    v
                };
                let a = draw(m);
                let b = draw(n);
                let f: Upoly = a.iter().map(|c| BigRational::from_integer(c.clone())).collect();
                let g: Upoly = b.iter().map(|c| BigRational::from_integer(c.clone())).collect();
                let expected = resultant(&f, &g);
                assert!(expected.is_integer());
                assert_eq!(specialize(&res, &a, &b), expected.to_integer(), "res({m},{n}) a={a:?} b={b:?}");
            }
        }
    }
}

#[test]
fn shared_root_gives_zero() {
    // (x - 2)(x + 1) and (x - 2)(x^2 + 3): common root 2.
    let res = gen_res(ResolventSpec::new(3, 2).unwrap()).unwrap();
    let a: Vec<BigInt> = [-6, 3, -2, 1].iter().map(|&c| BigInt::from(c)).collect();
    let b: Vec<BigInt> = [-2, -1, 1].iter().map(|&c| BigInt::from(c)).collect();
    assert!(specialize(&res, &a, &b).is_zero());
}
