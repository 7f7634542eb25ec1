use std::path::PathBuf;
use std::process::Command;

fn root() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../..")
}

/// Runs the binary from the workspace root; returns stdout, stderr and the exit code.
fn run(args: &str) -> (String, String, i32) {
    let out = Command::new(env!("CARGO_BIN_EXE_rtdich"))
        .current_dir(root())
        .args(args.split_whitespace())
        .output()
        .expect("binary runs");
    (
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
        out.status.code().unwrap_or(-1),
    )
}

const CASES: &[(&str, &str)] = &[
    ("validate_semion", "validate data/semion.md"),
    ("validate_hyp3", "validate data/hyp3.mg"),
    ("validate_z4_cocycle", "validate data/z4.cocycle"),
    ("classify_fib", "classify data/fib.md"),
    ("classify_ising", "classify data/ising.md"),
    ("classify_toric", "classify data/toric.md"),
    ("classify_doubled_semion", "classify data/doubled_semion.md"),
    ("classify_tv_z2cubed", "classify-tv data/z2cubed.group data/z2cubed.cocycle"),
    ("classify_tv_z4", "classify-tv data/z4.group data/z4.cocycle"),
    ("weights_semion", "weights data/semion.md"),
    ("partition_semion_k3", "partition data/semion.md data/k3.graph"),
    ("partition_weights_k3", "partition data/semion.weights data/k3.graph"),
    ("eval_graph_toric_k2", "eval-graph data/toric.md data/k2.graph"),
    ("eval_graph_toric_p3", "eval-graph data/toric.md data/p3.graph"),
    ("eval_halfedge_toric_k3", "eval-halfedge data/toric.md data/k3.graph"),
    ("eval_surgery_toric_k2", "eval-surgery data/toric.mg data/k2.graph"),
    ("eval_surgery_semion_k2", "eval-surgery data/semion.mg data/k2.graph"),
    ("eval_center_semion_k3", "eval-center data/semion.md data/k3.graph"),
    ("eval_tv_z2_k2", "eval-tv data/z2.group data/k2.graph"),
    ("gauss_hyp3_k2", "gauss data/hyp3.mg data/k2.graph"),
    ("mbr1_fib", "mbr1 data/fib.md"),
    ("mbr1_toric", "mbr1 data/toric.md"),
    ("plumb_k2", "plumb data/k2.graph"),
    ("homology_k3", "homology data/k3.graph"),
    ("psi_z2cubed", "psi data/z2cubed.group data/z2cubed.cocycle"),
    ("json_eval_graph", "--format json-lines eval-graph data/toric.md data/k2.graph"),
    ("json_validate_semion", "--format json-lines validate data/semion.md"),
    ("json_classify_fib", "--format json-lines classify data/fib.md"),
];

/// Output is compared against `tests/golden/<name>.out`; set `UPDATE_GOLDEN=1`
/// to rewrite the files after reviewing a change.
#[test]
fn golden_outputs() {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden");
    let update = std::env::var_os("UPDATE_GOLDEN").is_some();
    let mut mismatches = Vec::new();
    for (name, args) in CASES {
        let (stdout, stderr, code) = run(args);
        let got = format!("$ rtdich {args}\n{stdout}[exit {code}]\n{stderr}");
        let path = dir.join(format!("{name}.out"));
        if update {
            std::fs::write(&path, &got).unwrap();
            continue;
        }
        let want = std::fs::read_to_string(&path).unwrap_or_default();
        if want != got {
            mismatches.push(format!("{name}:\n--- expected\n{want}--- got\n{got}"));
        }
    }
    assert!(mismatches.is_empty(), "{}", mismatches.join("\n"));
}

#[test]
fn headline_values() {
    let first = |args: &str| run(args).0.lines().next().unwrap_or_default().to_string();
    assert_eq!(first("eval-graph data/toric.md data/k2.graph"), "Z(M_G): 8");
    assert_eq!(first("eval-surgery data/toric.mg data/k2.graph"), "Z(M): 8");
    assert_eq!(
        first("classify data/fib.md"),
        "RT: #P-hard (non-pointed; MBR1 violation at rows {0,1} cols {0,1})"
    );
    let (plumb, _, code) = run("plumb data/k2.graph");
    assert_eq!(code, 0);
    assert!(plumb.starts_with("size 6\n"));
    let entries: Vec<&str> = plumb.lines().filter(|l| l.starts_with("entry")).collect();
    assert_eq!(entries, vec!["entry 0 3 1"]);
}

#[test]
fn exit_codes_and_errors() {
    let (_, err, code) = run("eval-graph data/fib.md data/k2.graph");
    assert_eq!(code, 2);
    assert!(err.contains("not anomaly-free"), "{err}");
    let (_, err, code) = run("eval-graph data/toric.md data/missing.graph");
    assert_eq!(code, 2);
    assert!(err.contains("cannot read"), "{err}");
    let (_, _, code) = run("eval-graph --frobnicate data/toric.md data/k2.graph");
    assert_eq!(code, 2);
    let (_, err, code) = run("eval-graph data/toric.md data/k3.graph --budget 2");
    assert_eq!(code, 2);
    assert!(err.contains("budget exceeded"), "{err}");
    let dir = std::env::temp_dir().join(format!("rtdich-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let bad = dir.join("bad.md");
    let text = std::fs::read_to_string(root().join("data/semion.md")).unwrap();
    std::fs::write(&bad, text.replace("S 1 1 8:[-1,0,0,0]", "S 1 1 8:[1,0,0,0]")).unwrap();
    let (out, _, code) = run(&format!("validate {}", bad.display()));
    assert_eq!(code, 1);
    assert!(out.contains("FAIL  S^2 = Dim*C"), "{out}");
    let dup = dir.join("dup.md");
    std::fs::write(&dup, format!("{text}S 0 0 8:[0,1,0,0]\n")).unwrap();
    let (_, err, code) = run(&format!("validate {}", dup.display()));
    assert_eq!(code, 2);
    assert!(err.contains("line 10"), "{err}");
    std::fs::remove_dir_all(&dir).unwrap();
}
