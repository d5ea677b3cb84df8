use std::path::Path;
use std::process::{Command, Output};

use num_rational::BigRational;
use perronlab::dto::{CertificateJson, LacunarityJson, OrderJson, PerronJson, WitnessListJson};
use serde_json::Value;

fn run(args: &[&str]) -> Output {
    run_env(args, None)
}

fn run_env(args: &[&str], precision_env: Option<&str>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_perronlab"));
    cmd.args(args).env_remove("PERRONLAB_PRECISION");
    if let Some(p) = precision_env {
        cmd.env("PERRONLAB_PRECISION", p);
    }
    cmd.output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> Value {
    assert_eq!(code(o), 0, "stderr: {}", String::from_utf8_lossy(&o.stderr));
    serde_json::from_slice(&o.stdout).unwrap()
}

#[test]
fn perron_references() {
    let doc: PerronJson =
        serde_json::from_value(json(&run(&["perron", "--values", "1,2,3,4"]))).unwrap();
    assert_eq!(doc.g, "2");
    assert!(doc.exact);
    let doc: PerronJson =
        serde_json::from_value(json(&run(&["perron", "--values", "1,2,4", "--table"]))).unwrap();
    assert_eq!(doc.g, "2.5");
    assert_eq!((doc.k, doc.l), (1, 1));
    assert_eq!(doc.table.unwrap().len(), 1);
    assert_eq!(code(&run(&["perron", "--values", "1,2"])), 2);
    assert_eq!(code(&run(&["perron", "--values", "3,2,1"])), 2);
    assert_eq!(
        code(&run(&[
            "perron",
            "--values",
            "1,2,3",
            "--convention",
            "sideways"
        ])),
        2
    );
}

#[test]
fn values_from_files() {
    let dir = tempfile::tempdir().unwrap();
    let text = dir.path().join("u.txt");
    std::fs::write(&text, "# slopes\n0 1\n3, 7\n8\n").unwrap();
    let doc = json(&run(&["perron", "--file", text.to_str().unwrap()]));
    assert_eq!(doc["g"], "4.25");
    let js = dir.path().join("u.json");
    std::fs::write(&js, r#"{"values": ["1", "2", "4"]}"#).unwrap();
    assert_eq!(
        json(&run(&["perron", "--file", js.to_str().unwrap()]))["g"],
        "2.5"
    );
    assert_eq!(code(&run(&["perron", "--file", "/nonexistent/u.txt"])), 2);
}

#[test]
fn numbers_are_strings() {
    fn walk(v: &Value, path: &str) {
        match v {
            Value::Number(_) => {
                // counts, indices and levels stay integers
                let key = path.rsplit('.').next().unwrap();
                assert!(
                    [
                        "k",
                        "l",
                        "n",
                        "m",
                        "N",
                        "level",
                        "max_n",
                        "precision_bits",
                        "max_search",
                        "seed",
                        "work",
                        "first",
                        "last",
                        "order",
                        "nx",
                        "ny",
                        "rects",
                        "attempts",
                        "budget"
                    ]
                    .contains(&key)
                        || key.parse::<usize>().is_ok(),
                    "number at {path}"
                );
                assert!(
                    v.as_u64().is_some() || v.as_i64().is_some(),
                    "float at {path}"
                );
            }
            Value::Array(a) => a
                .iter()
                .enumerate()
                .for_each(|(i, x)| walk(x, &format!("{path}.{i}"))),
            Value::Object(o) => o.iter().for_each(|(k, x)| walk(x, &format!("{path}.{k}"))),
            _ => {}
        }
    }
    walk(
        &json(&run(&["perron", "--values", "0.1,0.2,0.4", "--table"])),
        "",
    );
    walk(
        &json(&run(&["maximal-probe", "--ap", "2", "--cells", "16"])),
        "",
    );
    walk(&json(&run(&["capacity", "--omega-e", "--n", "1,2"])), "");
}

#[test]
fn capacity_modes() {
    let doc = json(&run(&[
        "capacity",
        "--values",
        "0,1,3,4,7,9,12",
        "--n",
        "2",
    ]));
    assert_eq!(doc["method"], "brute_force");
    assert_eq!(doc["subset"]["values"].as_array().unwrap().len(), 4);
    let g: f64 = doc["upper_bounds"]["2"].as_str().unwrap().parse().unwrap();
    assert!((g - 25.0 / 12.0).abs() < 1e-12);
    let doc = json(&run(&["capacity", "--omega-e", "--n", "1,2,3"]));
    assert_eq!(doc["upper_bounds"]["1"], "vacuous");
    let bound: f64 = doc["certified_bound"].as_str().unwrap().parse().unwrap();
    assert!(bound > 2.0 && bound < 6.0);
    assert_eq!(
        code(&run(&["capacity", "--values", "1,2,3,4,5", "--n", "1,2"])),
        2
    );
}

fn certificate(dir: &Path, n: &str, extra: &[&str]) -> (Output, Vec<u8>) {
    let mut args = vec!["theorem1", "--n", n, "--output-dir", dir.to_str().unwrap()];
    args.extend_from_slice(extra);
    let o = run(&args);
    let bytes = std::fs::read(dir.join("theorem1_certificate.json")).unwrap_or_default();
    (o, bytes)
}

#[test]
fn theorem1_certificate_file() {
    let dir = tempfile::tempdir().unwrap();
    let (o, first) = certificate(dir.path(), "1,2,3,4", &[]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("conclusion: Perron capacity <="));
    let cert: CertificateJson = serde_json::from_slice(&first).unwrap();
    assert!(cert.pass);
    assert_eq!(cert.trig, "cos");
    let conclusion: f64 = cert.conclusion.as_deref().unwrap().parse().unwrap();
    assert!(conclusion <= 6.0);
    assert_eq!(cert.records[1].a, Some(44));
    assert_eq!(
        cert.records.iter().map(|r| r.n).collect::<Vec<_>>(),
        [1, 2, 3, 4]
    );
    // round trip through the document types
    let again = serde_json::to_string_pretty(&cert).unwrap() + "\n";
    assert_eq!(again.as_bytes(), &first[..]);

    let (o, second) = certificate(dir.path(), "1,2,3,4", &[]);
    assert_eq!(code(&o), 0);
    assert_eq!(first, second);
}

#[test]
fn theorem1_search_failure() {
    let dir = tempfile::tempdir().unwrap();
    let (o, bytes) = certificate(dir.path(), "2", &["--max-search", "10"]);
    assert_eq!(code(&o), 3);
    let cert: CertificateJson = serde_json::from_slice(&bytes).unwrap();
    assert!(!cert.pass);
    assert!(cert.conclusion.is_none());
    assert!(cert.records[0].failure.as_deref().unwrap().contains("E(4)"));
    assert_eq!(code(&run(&["theorem1", "--n", "3,2"])), 2);
}

#[test]
fn sine_variant() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&[
        "omega-s",
        "--n",
        "1,2,3",
        "--output-dir",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    let cert: CertificateJson = serde_json::from_slice(
        &std::fs::read(dir.path().join("omega_s_certificate.json")).unwrap(),
    )
    .unwrap();
    assert_eq!(cert.trig, "sin");
    assert!(cert.pass);
}

fn witnesses(args: &[&str]) -> Vec<u64> {
    let doc: WitnessListJson = serde_json::from_value(json(&run(args))).unwrap();
    doc.witnesses.iter().map(|w| w.n).collect()
}

#[test]
fn find_e_lists() {
    assert!(witnesses(&["find-e", "--level", "4", "--max-n", "100"]).contains(&44));
    assert!(witnesses(&["find-e", "--level", "14", "--max-n", "1000"]).contains(&710));
    let o = run(&["find-e", "--level", "30", "--max-n", "100"]);
    assert_eq!(code(&o), 0);
    assert!(witnesses(&["find-e", "--level", "30", "--max-n", "100"]).is_empty());
    assert_eq!(
        witnesses(&["find-e", "--level", "6", "--max-n", "800"]),
        [333, 377, 710]
    );
}

fn fraction(q: &BigRational) -> String {
    format!("{}/{}", q.numer(), q.denom())
}

/// `{2^-k + 4^-l : 0 <= l <= k <= kmax}`.
fn two_level(kmax: u32) -> String {
    let pow2 = |k: u32| BigRational::from_integer(2.into()).pow(k as i32);
    let mut v: Vec<BigRational> = Vec::new();
    for k in 0..=kmax {
        for l in 0..=k {
            v.push(pow2(k).recip() + pow2(2 * l).recip());
        }
    }
    v.sort();
    v.dedup();
    v.iter().map(fraction).collect::<Vec<_>>().join(",")
}

#[test]
fn lacunary_orders() {
    let order = |args: &[&str]| -> OrderJson {
        let doc: LacunarityJson = serde_json::from_value(json(&run(args))).unwrap();
        doc.order
    };
    assert_eq!(order(&["lacunary", "--values", "3"]), OrderJson::Finite(0));
    let dyadic: Vec<String> = (2..=10).rev().map(|k| format!("1/{}", 1u32 << k)).collect();
    assert_eq!(
        order(&["lacunary", "--values", &dyadic.join(",")]),
        OrderJson::Finite(1)
    );
    let example = two_level(6);
    let doc: LacunarityJson =
        serde_json::from_value(json(&run(&["lacunary", "--values", &example]))).unwrap();
    assert_eq!(doc.order, OrderJson::Finite(2));
    assert!(doc.exact);
    assert!(doc.witness_tree.is_some());

    let o = run(&["lacunary", "--values", &example, "--budget", "100"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("exceeds"));
    let capped = order(&["lacunary", "--values", &example, "--max-order", "1"]);
    assert_eq!(capped, OrderJson::Marker("exceeds max_order 1".into()));
    assert_eq!(
        code(&run(&["lacunary", "--values", "1,2", "--ratio", "3/2"])),
        2
    );

    let doc = json(&run(&[
        "lacunary",
        "--values",
        &dyadic.join(","),
        "--cover",
        "--max-order",
        "0",
        "--max-cover",
        "9",
    ]));
    assert_eq!(doc["cover"]["found"], true);
}

fn csv_rows(text: &str) -> Vec<Vec<String>> {
    text.lines()
        .skip(2)
        .map(|l| l.split(',').map(str::to_owned).collect())
        .collect()
}

#[test]
fn kakeya_single_slope() {
    let o = run(&["kakeya", "--slopes", "0", "--scheme", "bush"]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    assert!(text.starts_with("# precision_bits=256"));
    let rows = csv_rows(&text);
    assert_eq!(rows.len(), 1);
    let ratio: f64 = rows[0][6].parse().unwrap();
    assert!((ratio - 16.0).abs() < 0.16);
    assert_eq!(
        code(&run(&["kakeya", "--slopes", "0", "--scheme", "spiral"])),
        2
    );
    assert_eq!(code(&run(&["kakeya", "--slopes", "0,1,2"])), 2);
    assert_eq!(code(&run(&["kakeya"])), 2);
}

#[test]
fn kakeya_growth_and_files() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let o = run(&[
        "kakeya",
        "--ap",
        "2..5",
        "--scheme",
        "perron_tree",
        "--output-dir",
        d,
        "--csv",
        "blow.csv",
        "--svg",
        "tree.svg",
    ]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    assert_eq!(
        std::fs::read_to_string(dir.path().join("blow.csv")).unwrap(),
        text
    );
    let svg = std::fs::read_to_string(dir.path().join("tree.svg")).unwrap();
    assert_eq!(svg.matches("<polygon").count(), 64);
    let ratios: Vec<f64> = csv_rows(&text)
        .iter()
        .map(|r| r[6].parse().unwrap())
        .collect();
    assert_eq!(ratios.len(), 4);
    assert!(ratios.windows(2).all(|w| w[0] < w[1]), "{ratios:?}");
}

#[test]
fn probe_report() {
    let doc = json(&run(&["maximal-probe", "--ap", "2", "--cells", "24"]));
    assert_eq!(doc["N"], 2);
    assert_eq!(doc["coefficient"], "0.6761");
    assert_eq!(doc["level_set_covers_x"], true);
    assert!(doc["note"].as_str().unwrap().contains("never a refutation"));
    let many = json(&run(&["maximal-probe", "--ap", "2..3", "--cells", "16"]));
    assert_eq!(many.as_array().unwrap().len(), 2);
    assert_eq!(
        code(&run(&["maximal-probe", "--ap", "2", "--alpha", "1"])),
        2
    );
}

#[test]
fn precision_precedence() {
    let bits = |o: &Output| json(o)["config"]["precision_bits"].as_u64().unwrap();
    assert_eq!(bits(&run(&["perron", "--values", "1,2,3"])), 256);
    assert_eq!(
        bits(&run_env(&["perron", "--values", "1,2,3"], Some("128"))),
        128
    );
    assert_eq!(
        bits(&run_env(
            &["--precision", "512", "perron", "--values", "1,2,3"],
            Some("128")
        )),
        512
    );
    assert_eq!(
        code(&run(&["--precision", "32", "perron", "--values", "1,2,3"])),
        2
    );
    assert_eq!(
        code(&run_env(&["perron", "--values", "1,2,3"], Some("32"))),
        2
    );
    assert_eq!(
        code(&run_env(&["perron", "--values", "1,2,3"], Some("many"))),
        2
    );
}

#[test]
fn usage_errors() {
    assert_eq!(code(&run(&[])), 2);
    assert_eq!(code(&run(&["frobnicate"])), 2);
    assert_eq!(code(&run(&["find-e"])), 2);
    assert_eq!(code(&run(&["--help"])), 0);
}

#[test]
fn seed_is_recorded() {
    let doc = json(&run(&[
        "--seed", "99", "find-e", "--level", "2", "--max-n", "50",
    ]));
    assert_eq!(doc["config"]["seed"], 99);
    let o = run(&[
        "--seed",
        "5",
        "kakeya",
        "--slopes",
        "0",
        "--montecarlo",
        "20000",
    ]);
    assert!(stdout(&o).starts_with("# precision_bits=256 max_search=1000000 seed=5"));
    assert!(String::from_utf8_lossy(&o.stderr).contains("montecarlo"));
}
