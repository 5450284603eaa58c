use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use tlsc::codec::{
    awgn_trial, brute_force_ml, cyclic_code, grid_code, leech_code, load_codebook, normalize,
    quotient_layer, save_codebook, AwgnConfig, DecodeMode, Label, LayerCodebook, LayerContent,
    LeechBeta, TorusCode, BRUTE_FORCE_CAP,
};
use tlsc::geometry::{distance, dot, RadiusVector};
use tlsc::lattice::Bundled;
use tlsc::layering::{permutation_layers, polygon2d_layers};
use tlsc::Error;

fn random_unit(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..n).map(|_| StandardNormal.sample(rng)).collect();
        if let Ok(u) = normalize(&v) {
            return u;
        }
    }
}

/// Exhaustive minimum distance and the total, straight from the codewords.
fn scan(code: &TorusCode) -> (usize, f64) {
    let pts = code.codewords(BRUTE_FORCE_CAP).unwrap();
    let mut best = f64::INFINITY;
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            best = best.min(distance(&pts[i], &pts[j]));
        }
    }
    (pts.len(), best)
}

#[test]
fn cyclic_code_sizes_and_distance() {
    let code = cyclic_code(0.3).unwrap();
    assert_eq!(code.total_m, BigUint::from(798u32));
    let (n, dmin) = scan(&code);
    assert_eq!(n, 798);
    assert!(dmin >= 0.3 - 1e-9, "{dmin}");
    // within-layer minima bound the whole code's minimum from above
    let layer_min = code
        .layers
        .iter()
        .map(|l| match &l.content {
            LayerContent::Cyclic(c) => c.dmin_achieved,
            _ => unreachable!(),
        })
        .fold(f64::INFINITY, f64::min);
    assert!(dmin <= layer_min + 1e-12);
    assert!(code.spot_check(2000, 1).unwrap() >= 0.3 - 1e-9);
}

#[test]
fn grid_code_keeps_distance() {
    let family = polygon2d_layers(0.4).unwrap();
    let code = grid_code(&family).unwrap();
    let (n, dmin) = scan(&code);
    assert_eq!(BigUint::from(n), code.total_m);
    assert!(dmin >= 0.4 - 1e-9, "{dmin}");
}

#[test]
fn labels_index_bijection() {
    let code = grid_code(&polygon2d_layers(0.5).unwrap()).unwrap();
    let labels = code.all_labels(BRUTE_FORCE_CAP).unwrap();
    for (i, l) in labels.iter().enumerate() {
        assert_eq!(code.index_of(l).unwrap(), BigUint::from(i));
        assert_eq!(&code.label_at(&BigUint::from(i)).unwrap(), l);
    }
    assert!(code.label_at(&code.total_m).is_err());
    let bad = Label { layer: code.layers.len(), coords: vec![BigUint::zero()] };
    assert!(matches!(code.encode(&bad), Err(Error::InvalidLabel(_))));
}

#[test]
fn round_trip_every_label() {
    for d in [0.3, 0.5] {
        let code = cyclic_code(d).unwrap();
        for l in code.all_labels(BRUTE_FORCE_CAP).unwrap() {
            let x = code.encode(&l).unwrap();
            let r = code.decode(&x, DecodeMode::Fast).unwrap();
            assert_eq!(r.label, l);
            assert!(r.distance < 1e-12);
            assert!(r.ml_certified);
            assert_eq!(r.tori_examined, 1);
        }
    }
    let code = grid_code(&polygon2d_layers(0.4).unwrap()).unwrap();
    for l in code.all_labels(BRUTE_FORCE_CAP).unwrap() {
        let r = code.decode(&code.encode(&l).unwrap(), DecodeMode::Fast).unwrap();
        assert_eq!(r.label, l);
    }
}

#[test]
fn ml_matches_brute_force_on_grid_and_small_codes() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let codes = [
        cyclic_code(0.5).unwrap(),
        cyclic_code(0.4).unwrap(),
        grid_code(&polygon2d_layers(0.3).unwrap()).unwrap(),
    ];
    for code in &codes {
        for _ in 0..1500 {
            let x = random_unit(&mut rng, 4);
            let ml = code.decode(&x, DecodeMode::Ml).unwrap();
            let bf = brute_force_ml(code, &x, BRUTE_FORCE_CAP).unwrap();
            assert_eq!(ml.label, bf.label, "x = {x:?}");
            assert!(ml.ml_certified);
            assert!(ml.tori_examined <= code.layers.len());
        }
    }
}

#[test]
fn large_cyclic_layers_use_the_ellipse_search() {
    // d = 0.1 layers hold thousands of points; check the enumeration against
    // a plain scan of the layer
    let code = cyclic_code(0.1).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..300 {
        let x = random_unit(&mut rng, 4);
        let ml = code.decode(&x, DecodeMode::Ml).unwrap();
        let layer = &code.layers[ml.label.layer];
        let LayerContent::Cyclic(c) = &layer.content else { unreachable!() };
        let best = (0..c.order_m).map(|i| dot(&x, &c.point(i))).fold(f64::MIN, f64::max);
        assert_eq!(dot(&x, &ml.codeword), best);
        let brute = (0..code.layers.len())
            .map(|li| {
                let LayerContent::Cyclic(c) = &code.layers[li].content else { unreachable!() };
                (0..c.order_m).map(|i| dot(&x, &c.point(i))).fold(f64::MIN, f64::max)
            })
            .fold(f64::MIN, f64::max);
        assert_eq!(dot(&x, &ml.codeword), brute);
    }
}

#[test]
fn scaling_does_not_change_the_decision() {
    let code = cyclic_code(0.3).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..100 {
        let x = random_unit(&mut rng, 4);
        let lambda: f64 = rng.random_range(0.01..100.0);
        let y: Vec<f64> = x.iter().map(|v| v * lambda).collect();
        for mode in [DecodeMode::Fast, DecodeMode::Ml] {
            assert_eq!(code.decode(&x, mode).unwrap().label, code.decode(&y, mode).unwrap().label);
        }
    }
    assert!(matches!(code.decode(&[0.0; 4], DecodeMode::Ml), Err(Error::ZeroVector)));
    assert!(code.decode(&[1.0; 6], DecodeMode::Ml).is_err());
}

#[test]
fn small_perturbations_are_recovered_in_fast_mode() {
    let code = cyclic_code(0.3).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for l in code.all_labels(BRUTE_FORCE_CAP).unwrap() {
        let c = code.encode(&l).unwrap();
        let dir = random_unit(&mut rng, 4);
        let r: f64 = rng.random_range(0.0..0.149);
        let y: Vec<f64> = c.iter().zip(&dir).map(|(a, b)| a + r * b).collect();
        let out = code.decode(&y, DecodeMode::Fast).unwrap();
        assert_eq!(out.label, l);
        assert!(out.ml_certified);
    }
}

#[test]
fn degenerate_inputs_are_flagged() {
    let code = cyclic_code(0.3).unwrap();
    let r = code.decode(&[0.0, 0.0, 0.6, 0.8], DecodeMode::Ml).unwrap();
    assert!(r.degenerate);
    let bf = brute_force_ml(&code, &[0.0, 0.0, 0.6, 0.8], BRUTE_FORCE_CAP).unwrap();
    assert_eq!(r.label, bf.label);
}

#[test]
fn small_quotient_layers() {
    // D4 quotients on 8-D permutation-free layers
    let c = RadiusVector::new(vec![0.5; 4]).unwrap();
    let beta = 0.35;
    let layer = LayerCodebook::new(c.clone(), quotient_layer(Bundled::D4, beta, beta, &c).unwrap()).unwrap();
    let LayerContent::Quotient(q) = &layer.content else { unreachable!() };
    let order = q.group.order().to_u64().unwrap();
    assert!(order > 1 && order <= 10_000);
    let code = TorusCode::from_layers(4, beta * 0.5, vec![layer]).unwrap();
    let pts = code.codewords(BRUTE_FORCE_CAP).unwrap();
    // distinct and separated by the chord of the flat distance beta on radius 1/2
    let chord = 2.0 * 0.5 * (beta / (2.0 * 0.5)).sin();
    let mut best = f64::INFINITY;
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            best = best.min(distance(&pts[i], &pts[j]));
        }
    }
    assert!(best >= chord - 1e-9, "{best} < {chord}");
    for l in code.all_labels(BRUTE_FORCE_CAP).unwrap() {
        let r = code.decode(&code.encode(&l).unwrap(), DecodeMode::Fast).unwrap();
        assert_eq!(r.label, l);
    }
}

#[test]
fn leech_code_totals_and_guards() {
    let code = leech_code(0.1, LeechBeta::Derived).unwrap();
    assert_eq!(code.layers.len(), 24);
    let per_layer = BigUint::from(11u32) * BigUint::from(2u32).pow(105);
    assert_eq!(code.total_m, &per_layer * 24u32);
    assert!(matches!(
        brute_force_ml(&code, &vec![1.0; 48], BRUTE_FORCE_CAP),
        Err(Error::CodeTooLarge { .. })
    ));
    assert!(code.spot_check(200, 2).unwrap() >= 0.1 - 1e-9);
    // a codeword decodes to itself
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..5 {
        let l = code.random_label(&mut rng).unwrap();
        let r = code.decode(&code.encode(&l).unwrap(), DecodeMode::Fast).unwrap();
        assert_eq!(r.label, l);
        assert!(r.distance < 1e-9);
    }
    let fam = permutation_layers(24, 0.1).unwrap();
    assert_eq!(fam.len(), 24);
}

#[test]
fn json_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    for code in [cyclic_code(0.5).unwrap(), grid_code(&polygon2d_layers(0.5).unwrap()).unwrap()] {
        let path = dir.path().join("code.json");
        save_codebook(&code, &path).unwrap();
        let back = load_codebook(&path).unwrap();
        assert_eq!(back.total_m, code.total_m);
        assert_eq!(back.codewords(BRUTE_FORCE_CAP).unwrap(), code.codewords(BRUTE_FORCE_CAP).unwrap());
    }
    let code = leech_code(0.1, LeechBeta::Published).unwrap();
    let path = dir.path().join("leech.json");
    save_codebook(&code, &path).unwrap();
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.contains(&code.total_m.to_string()));
    let back = load_codebook(&path).unwrap();
    assert_eq!(back.total_m, code.total_m);
    let k = Label { layer: 3, coords: code.layers[3].coords_from_index(&BigUint::from(12345u32)).unwrap() };
    assert_eq!(back.encode(&k).unwrap(), code.encode(&k).unwrap());
    // tampered totals are refused
    let bad = text.replacen(&code.total_m.to_string(), "7", 1);
    std::fs::write(&path, bad).unwrap();
    assert!(load_codebook(&path).is_err());
}

#[test]
fn awgn_statistics() {
    let code = cyclic_code(0.3).unwrap();
    let cfg = |snr_db: f64, threads| AwgnConfig {
        snr_db,
        trials: 2000,
        seed: 7,
        modes: vec![DecodeMode::Fast, DecodeMode::Ml],
        threads,
    };
    let clean = awgn_trial(&code, &cfg(f64::INFINITY, Some(2))).unwrap();
    assert!(clean.stats.iter().all(|s| s.errors == 0));
    let a = awgn_trial(&code, &cfg(12.0, Some(1))).unwrap();
    let b = awgn_trial(&code, &cfg(12.0, Some(4))).unwrap();
    assert_eq!(a, b);
    let (fast, ml) = (&a.stats[0], &a.stats[1]);
    assert!(ml.errors > 0);
    assert!(fast.rate >= ml.rate - (ml.ci_high - ml.ci_low));
    let zero = AwgnConfig { trials: 0, ..cfg(10.0, None) };
    assert!(awgn_trial(&code, &zero).is_err());
}
