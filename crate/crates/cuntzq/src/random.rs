//! Seeded observables for the randomized suites.

use cuntzq_core::scalar::rat;
use cuntzq_core::white_noise::ChaosPoly;
use cuntzq_core::{MultiIndex, Polynomial, Rational};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Small nonzero rational.
pub fn coefficient<R: Rng>(rng: &mut R) -> Rational {
    let mut num = 0;
    while num == 0 {
        num = rng.gen_range(-5..=5);
    }
    rat(num, rng.gen_range(1..=3))
}

/// A multi-index of total degree `degree` over `vars` variables.
pub fn multi_index<R: Rng>(rng: &mut R, vars: usize, degree: u32) -> MultiIndex {
    let mut e = vec![0u32; vars];
    for _ in 0..degree {
        e[rng.gen_range(0..vars)] += 1;
    }
    MultiIndex::from_exponents(e)
}

/// `c x^alpha` with `|alpha|` drawn from `0..=max_degree`.
pub fn monomial<R: Rng>(rng: &mut R, n: usize, max_degree: u32) -> Polynomial {
    let d = rng.gen_range(0..=max_degree);
    Polynomial::monomial(n, multi_index(rng, 2 * n, d), coefficient(rng))
}

/// Up to four terms of degree at most `max_degree`; the first term has
/// degree `max_degree` so the result is never constant when `max_degree > 0`.
pub fn polynomial<R: Rng>(rng: &mut R, n: usize, max_degree: u32) -> Polynomial {
    let terms = rng.gen_range(1..=4);
    let mut f = Polynomial::monomial(n, multi_index(rng, 2 * n, max_degree), coefficient(rng));
    for _ in 1..terms {
        let d = rng.gen_range(0..=max_degree);
        f = f
            .checked_add(&Polynomial::monomial(n, multi_index(rng, 2 * n, d), coefficient(rng)))
            .expect("same dimension");
    }
    f
}

/// Chaos element with up to three Wick monomials of order at most `max_order`.
pub fn chaos<R: Rng>(rng: &mut R, modes: usize, max_order: u32) -> ChaosPoly {
    let terms = rng.gen_range(1..=3);
    let mut out = ChaosPoly::zero(modes);
    for t in 0..terms {
        let d = if t == 0 { max_order } else { rng.gen_range(0..=max_order) };
        let m = ChaosPoly::wick_monomial(modes, multi_index(rng, 2 * modes, d), coefficient(rng));
        out = out.checked_add(&m).expect("same mode count");
    }
    out
}
