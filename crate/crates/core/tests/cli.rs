use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use num_bigint::BigUint;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use tlsc::codec::{load_codebook, normalize};

fn tlsc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tlsc")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn write_vectors(path: &Path, rows: &[Vec<f64>]) {
    let text: Vec<String> = rows
        .iter()
        .map(|r| r.iter().map(|v| format!("{v:e}")).collect::<Vec<_>>().join(" "))
        .collect();
    fs::write(path, text.join("\n")).unwrap();
}

#[test]
fn construct_summary_and_codebook() {
    let dir = tempfile::tempdir().unwrap();
    let json = dir.path().join("c.json");
    let o = tlsc(&["construct", "--dim", "4", "--dmin", "0.3", "--kind", "cyclic", "--out", json.to_str().unwrap()]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.lines().any(|l| l == "layers=6 total=798"), "{text}");
    assert!(text.contains("M=233") && text.contains("M=146") && text.contains("M=20"));
    let code = load_codebook(&json).unwrap();
    assert_eq!(code.total_m, BigUint::from(798u32));
}

#[test]
fn construct_leech_total_is_exact() {
    let expected = BigUint::from(24u32 * 11) << 105u32;
    let o = tlsc(&["construct", "--dim", "48", "--dmin", "0.1", "--kind", "quotient", "--lattice", "leech"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    let last = text.lines().last().unwrap();
    assert_eq!(last, format!("layers=24 total={expected}"));
    assert!(expected.to_string().starts_with("107091"));
    assert_eq!(expected.to_string().len(), 35);
    let o = tlsc(&["construct", "--dim", "48", "--dmin", "0.1", "--kind", "quotient", "--published-beta"]);
    assert!(stdout(&o).ends_with(&format!("layers=24 total={expected}\n")));
}

#[test]
fn infeasible_parameters_exit_two() {
    let o = tlsc(&["construct", "--dim", "4", "--dmin", "1.9"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("1.9"));
    assert_eq!(tlsc(&["construct", "--dim", "5", "--dmin", "0.3"]).status.code(), Some(2));
    assert_eq!(tlsc(&["bounds", "--dmin", ""]).status.code(), Some(2));
    assert_eq!(tlsc(&["bounds"]).status.code(), Some(2));
}

#[test]
fn bounds_csv() {
    let o = tlsc(&["bounds", "--dmin", "0.3", "--both-rules"]);
    assert!(o.status.success());
    let mut r = csv::Reader::from_reader(o.stdout.as_slice());
    let header: Vec<String> = r.headers().unwrap().iter().map(String::from).collect();
    assert_eq!(header, ["d", "layer_index", "face_dim", "count", "total", "kind", "rule"]);
    let rows: Vec<csv::StringRecord> = r.records().map(Result::unwrap).collect();
    let total = |kind: &str, rule: &str| {
        rows.iter().find(|x| &x[5] == kind && &x[6] == rule).map(|x| x[4].to_string()).unwrap()
    };
    assert_eq!(total("upper", "project-on-zero"), "826");
    assert_eq!(total("lower", "grid"), "652");
    assert_eq!(rows.len(), 18);
}

#[test]
fn decode_codewords_and_perturbations() {
    let dir = tempfile::tempdir().unwrap();
    let json = dir.path().join("c.json");
    assert!(tlsc(&["construct", "--dim", "4", "--dmin", "0.3", "--out", json.to_str().unwrap()]).status.success());
    let code = load_codebook(&json).unwrap();
    let words = code.codewords(1000).unwrap();

    let exact = dir.path().join("exact.txt");
    write_vectors(&exact, &words);
    let o = tlsc(&["decode", "--code", json.to_str().unwrap(), "--input", exact.to_str().unwrap()]);
    assert!(o.status.success());
    let mut r = csv::Reader::from_reader(o.stdout.as_slice());
    let labels: Vec<String> = code.all_labels(1000).unwrap().iter().map(|l| l.to_string()).collect();
    let mut n = 0;
    for (i, rec) in r.records().enumerate() {
        let rec = rec.unwrap();
        assert_eq!(rec[2], labels[i]);
        assert!(rec[3].parse::<f64>().unwrap() < 1e-12);
        n += 1;
    }
    assert_eq!(n, 798);

    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let noise = Normal::new(0.0, 0.01).unwrap();
    let noisy: Vec<Vec<f64>> = words
        .iter()
        .map(|w| normalize(&w.iter().map(|v| v + noise.sample(&mut rng)).collect::<Vec<_>>()).unwrap())
        .collect();
    let path = dir.path().join("noisy.txt");
    write_vectors(&path, &noisy);
    for mode in ["fast", "ml"] {
        let o = tlsc(&["decode", "--code", json.to_str().unwrap(), "--input", path.to_str().unwrap(), "--mode", mode]);
        let mut r = csv::Reader::from_reader(o.stdout.as_slice());
        let got: Vec<String> = r.records().map(|x| x.unwrap()[2].to_string()).collect();
        assert_eq!(got, labels, "mode {mode}");
    }
}

#[test]
fn malformed_input_names_the_line() {
    let dir = tempfile::tempdir().unwrap();
    let json = dir.path().join("c.json");
    assert!(tlsc(&["construct", "--dim", "4", "--dmin", "0.5", "--out", json.to_str().unwrap()]).status.success());
    let input = dir.path().join("in.txt");
    fs::write(&input, "1 0 0 0\n0 1 0 0\n0 1 x 0\n").unwrap();
    let o = tlsc(&["decode", "--code", json.to_str().unwrap(), "--input", input.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 3"), "{}", String::from_utf8_lossy(&o.stderr));
    fs::write(&input, "1 0 0 0\n0 0 0 0\n").unwrap();
    let o = tlsc(&["decode", "--code", json.to_str().unwrap(), "--input", input.to_str().unwrap()]);
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 2"));
    let o = tlsc(&["decode", "--code", dir.path().join("missing.json").to_str().unwrap(), "--input", input.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn simulate_is_reproducible() {
    let args = ["simulate", "--dim", "4", "--dmin", "0.3", "--snr", "8,30", "--trials", "400", "--seed", "7"];
    let a = tlsc(&args);
    assert!(a.status.success());
    let mut threaded = vec!["--threads", "3"];
    threaded.extend_from_slice(&args);
    assert_eq!(a.stdout, tlsc(&args).stdout);
    assert_eq!(a.stdout, tlsc(&threaded).stdout);
    let mut r = csv::Reader::from_reader(a.stdout.as_slice());
    let rows: Vec<csv::StringRecord> = r.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 4);
    for row in &rows {
        if &row[0] == "30.0" {
            assert_eq!(&row[3], "0", "{row:?}");
        }
    }
    let other = tlsc(&["simulate", "--dim", "4", "--dmin", "0.3", "--snr", "8", "--trials", "400", "--seed", "8"]);
    assert_ne!(other.stdout, tlsc(&["simulate", "--dim", "4", "--dmin", "0.3", "--snr", "8", "--trials", "400"]).stdout);
}

#[test]
fn timestamp_line_is_opt_in() {
    let plain = stdout(&tlsc(&["bounds", "--dmin", "0.3"]));
    assert!(plain.starts_with("d,"));
    let stamped = stdout(&tlsc(&["--timestamp", "bounds", "--dmin", "0.3"]));
    let (first, rest) = stamped.split_once('\n').unwrap();
    assert!(first.starts_with('#'));
    assert_eq!(rest, plain);
}

#[test]
fn strict_tables_report_deviations() {
    let o = tlsc(&["tables", "--quick", "--strict"]);
    assert_eq!(o.status.code(), Some(3));
    let text = stdout(&o);
    let cell = |prefix: &str| text.lines().find(|l| l.starts_with(prefix)).unwrap_or_else(|| panic!("{prefix}")).to_string();
    assert!(cell("sizes-4d,0.3,tlsc,798,").contains(",PASS,"));
    assert!(cell("layers-4d-0.3,1,M,233,").contains(",PASS,"));
    assert!(cell("bounds-4d,0.5,upper,").contains(",DEVIATION,"));
    assert!(cell("bounds-4d,0.3,upper,826,").contains(",PASS,"));
    assert_eq!(tlsc(&["tables", "--quick"]).status.code(), Some(0));
}

#[test]
fn slices() {
    let o = tlsc(&["slice", "--dim", "5", "--dmin", "0.5", "--verify"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.contains("published=374"));
    assert!(text.contains("verified min distance="));
    let o = tlsc(&["slice", "--dmin", "1.4142135623730951", "--verify"]);
    let total: u64 = stdout(&o).lines().last().unwrap().rsplit('=').next().unwrap().parse().unwrap();
    assert!(total >= 4);
    assert_eq!(tlsc(&["slice", "--dim", "7", "--dmin", "0.5"]).status.code(), Some(2));
}
