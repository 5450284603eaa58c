use std::collections::HashSet;
use std::f64::consts::PI;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use tlsc::geometry::RadiusVector;
use tlsc::layering::PermutationLayerParams;
use tlsc::lattice::basis::{int_determinant, LatticeBasis, Rat};
use tlsc::lattice::quotient::box_representative;
use tlsc::lattice::{
    certify_minimal_step, orthogonal_fit, per_axis_distance, quotient_structure,
    hermite_normal_form, smith_normal_form, Bundled,
};

fn minors_gcd(m: &[Vec<BigInt>], k: usize) -> BigInt {
    let n = m.len();
    let subsets: Vec<Vec<usize>> = (0u32..1 << n)
        .filter(|s| s.count_ones() as usize == k)
        .map(|s| (0..n).filter(|i| s >> i & 1 == 1).collect())
        .collect();
    let mut g = BigInt::zero();
    for rows in &subsets {
        for cols in &subsets {
            let sub: Vec<Vec<BigInt>> =
                rows.iter().map(|&r| cols.iter().map(|&c| m[r][c].clone()).collect()).collect();
            g = g.gcd(&int_determinant(&sub));
        }
    }
    g
}

#[test]
fn smith_factors_match_determinantal_divisors() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut done = 0;
    while done < 150 {
        let n = 2 + done % 3;
        let m: Vec<Vec<BigInt>> = (0..n)
            .map(|_| (0..n).map(|_| BigInt::from(rng.random_range(-9..=9))).collect())
            .collect();
        if int_determinant(&m).is_zero() {
            continue;
        }
        let f = smith_normal_form(&m).unwrap();
        tlsc::lattice::snf::check_smith(&m, &f);
        let mut prev = BigInt::one();
        for k in 1..=n {
            let dk = minors_gcd(&m, k);
            assert_eq!(&f.diagonal[k - 1] * &prev, dk, "matrix {m:?}");
            prev = dk;
        }
        done += 1;
    }
}

fn random_sublattice(rng: &mut ChaCha8Rng, n: usize) -> Option<(LatticeBasis, LatticeBasis)> {
    let b: Vec<Vec<i64>> =
        (0..n).map(|_| (0..n).map(|_| rng.random_range(-3..=3)).collect()).collect();
    let m: Vec<Vec<i64>> =
        (0..n).map(|_| (0..n).map(|_| rng.random_range(-4..=4)).collect()).collect();
    let b = LatticeBasis::from_integers(&b, 1.0).ok()?;
    let mr: Vec<Vec<Rat>> = m.iter().map(|r| r.iter().map(|&v| Rat::from_integer(v.into())).collect()).collect();
    let b1 = tlsc::lattice::basis::mat_mul(b.matrix(), &mr);
    let b1 = LatticeBasis::new(b1, 1.0).ok()?;
    Some((b, b1))
}

#[test]
fn coset_labeling_is_an_isomorphism() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut checked = 0;
    while checked < 40 {
        let n = 2 + checked % 2;
        let Some((b, b1)) = random_sublattice(&mut rng, n) else { continue };
        let g = quotient_structure(&b, &b1).unwrap();
        let order = g.order().to_u64().unwrap();
        if order > 10_000 {
            continue;
        }
        assert_eq!(
            g.order(),
            &(b1.determinant() / b.determinant()).abs().to_integer()
        );
        for w in g.invariant_factors().windows(2) {
            assert!(w[1].is_multiple_of(&w[0]));
        }
        // every representative in a distinct coset of Λ1
        let b1_inv = b1.inverse();
        let reps: Vec<Vec<Rat>> = (0..order)
            .map(|i| {
                let k = g.label_from_index(&BigInt::from(i)).unwrap();
                b.point(&g.representative(&k).unwrap())
            })
            .collect();
        let mut classes = HashSet::new();
        for r in &reps {
            // canonical form: fractional part of the Λ1 coordinates
            let y = tlsc::lattice::basis::mat_vec(b1_inv, r);
            let frac: Vec<Rat> = y.iter().map(|v| v - v.floor()).collect();
            classes.insert(frac);
        }
        assert_eq!(classes.len() as u64, order);
        // closure: label(rep(a) + rep(b)) = a + b
        for _ in 0..50 {
            let ia = BigInt::from(rng.random_range(0..order));
            let ib = BigInt::from(rng.random_range(0..order));
            let ka = g.label_from_index(&ia).unwrap();
            let kb = g.label_from_index(&ib).unwrap();
            let ya = g.representative(&ka).unwrap();
            let yb = g.representative(&kb).unwrap();
            let sum: Vec<BigInt> = ya.iter().zip(&yb).map(|(x, y)| x + y).collect();
            assert_eq!(g.label_of(&sum).unwrap(), g.add_labels(&ka, &kb).unwrap());
        }
        checked += 1;
    }
}

/// Invariant factors recovered from `|G/mG| = [Λ : mΛ + Λ1]` for prime powers
/// `m`, computed with Hermite forms only.
fn factors_from_index_counts(b: &LatticeBasis, b1: &LatticeBasis) -> Vec<BigInt> {
    let n = b.dim();
    // integer coordinates of Λ1 relative to B: Λ = Z^n, Λ1 = columns of Q
    let q = b.sublattice_coordinates(b1).unwrap();
    let order = int_determinant(&q).abs();
    let index = |m: &BigInt| -> BigInt {
        let mut gens: Vec<Vec<BigInt>> = (0..n)
            .map(|i| (0..n).map(|j| if i == j { m.clone() } else { BigInt::zero() }).collect())
            .collect();
        gens.extend((0..n).map(|j| q.iter().map(|r| r[j].clone()).collect::<Vec<_>>()));
        let h = hermite_normal_form(&gens);
        (0..n).fold(BigInt::one(), |a, i| a * &h[i][i])
    };
    let mut primes = Vec::new();
    let mut rest = order.clone();
    let mut p = BigInt::from(2);
    while rest > BigInt::one() {
        if rest.is_multiple_of(&p) {
            primes.push(p.clone());
            while rest.is_multiple_of(&p) {
                rest /= &p;
            }
        }
        p += 1;
    }
    // multiplicity of p^k among the factors = log_p(|G/p^k G| / |G/p^(k-1) G|)
    let mut factors = vec![BigInt::one(); n];
    for p in primes {
        let mut prev = BigInt::one();
        let mut pk = p.clone();
        loop {
            let cur = index(&pk);
            let mut ratio = &cur / &prev;
            if ratio.is_one() {
                break;
            }
            let mut count = 0;
            while ratio > BigInt::one() {
                ratio /= &p;
                count += 1;
            }
            // the `count` largest factors are divisible by p^k
            for f in factors.iter_mut().rev().take(count) {
                *f *= &p;
            }
            prev = cur;
            pk *= &p;
        }
    }
    factors
}

fn leech_layer(beta: f64) -> (LatticeBasis, tlsc::lattice::BoxFit) {
    let p = PermutationLayerParams::solve(24, 0.1).unwrap();
    let c = p.radius(0);
    let b = Bundled::Leech.scaled(beta).unwrap();
    let fit = orthogonal_fit(&b, &c, beta).unwrap();
    (b, fit)
}

fn derived_beta() -> f64 {
    let p = PermutationLayerParams::solve(24, 0.1).unwrap();
    let c = p.radius(0);
    per_axis_distance(0.1, c.get(1)).unwrap()
}

#[test]
fn leech_layer_counts() {
    let p = PermutationLayerParams::solve(24, 0.1).unwrap();
    assert!((p.t - 1.35234).abs() < 1e-5, "t = {}", p.t);
    let beta = derived_beta();
    assert!((beta - 0.101072).abs() < 2e-5, "beta = {beta}");
    let expected_order = BigInt::from(11) * BigInt::from(2).pow(105);
    for beta in [0.10187, beta] {
        let (b, fit) = leech_layer(beta);
        // α = √2 β
        assert!((fit.alpha_scale / beta - 2f64.sqrt()).abs() < 1e-12);
        assert!(certify_minimal_step(&b, &fit.alpha_exact).unwrap());
        let mut want = vec![8u64; 24];
        want[0] = 11;
        assert_eq!(fit.counts, want);
        let b1 = fit.sublattice(&b).unwrap();
        let g = quotient_structure(&b, &b1).unwrap();
        assert_eq!(*g.order(), expected_order);
        assert_eq!(g.invariant_factors(), &factors_from_index_counts(&b, &b1)[..]);
        // frozen after the index-count oracle agreed
        let mut frozen = vec![BigInt::from(16); 11];
        frozen.extend(vec![BigInt::from(32); 11]);
        frozen.push(BigInt::from(704));
        assert_eq!(g.nontrivial_factors(), frozen);
        let total = g.order() * BigInt::from(24);
        let total_f = total.to_f64().unwrap();
        assert!((total_f / 1.07091e34 - 1.0).abs() < 5e-6);
        let order_f = g.order().to_f64().unwrap();
        assert!((order_f / 4.46213e32 - 1.0).abs() < 5e-6);
    }
}

#[test]
fn guard_band_keeps_seam_pairs_apart() {
    // a skew planar lattice, min distance sqrt(5) before scaling
    let b = LatticeBasis::from_integers(&[vec![2, 1], vec![1, -2]], 0.21).unwrap();
    let beta = 5f64.sqrt() * 0.21;
    let c = RadiusVector::new(vec![0.6, 0.8]).unwrap();
    let fit = orthogonal_fit(&b, &c, beta).unwrap();
    let g = quotient_structure(&b, &fit.sublattice(&b).unwrap()).unwrap();
    let periods = fit.periods();
    let order = g.order().to_u64().unwrap();
    let pts: Vec<Vec<f64>> = (0..order)
        .map(|i| {
            let k = g.label_from_index(&BigInt::from(i)).unwrap();
            box_representative(&g, &b, &periods, &k)
                .unwrap()
                .iter()
                .map(|v| v.to_f64().unwrap() * b.scale())
                .collect()
        })
        .collect();
    let lengths: Vec<f64> = c.entries().iter().map(|ci| 2.0 * PI * ci).collect();
    let mut seam_pairs = 0;
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            let mut d2 = 0.0;
            let mut across = false;
            for k in 0..2 {
                let raw = (pts[i][k] - pts[j][k]).abs();
                let wrapped = lengths[k] - raw;
                if wrapped < raw {
                    across = true;
                }
                d2 += raw.min(wrapped).powi(2);
            }
            seam_pairs += usize::from(across);
            assert!(d2.sqrt() >= beta - 1e-12, "pair {i},{j} at {}", d2.sqrt());
        }
    }
    assert!(seam_pairs > 0);
}
