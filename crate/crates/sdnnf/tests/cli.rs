use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn sdnnf(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sdnnf")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn stat(text: &str, key: &str) -> usize {
    text.lines()
        .find_map(|l| l.strip_prefix(key).and_then(|r| r.trim().parse().ok()))
        .unwrap_or_else(|| panic!("no `{key}` in {text}"))
}

const FORMULA: &str = "p cnf 4 4\n1 2 0\n-2 3 0\n3 4 -1 0\n-4 -3 0\n";

#[test]
fn compile_count_and_verify() {
    let dir = TempDir::new().unwrap();
    let cnf = write(&dir, "f.cnf", FORMULA);
    let o = sdnnf(&["compile", s(&cnf)]);
    assert_eq!(o.status.code(), Some(0), "{o:?}");
    let width = stat(&stdout(&o), "width ");
    let gates = stat(&stdout(&o), "gates ");
    let circuit = dir.path().join("f.sdnnf");
    assert!(dir.path().join("f.vtree").exists());

    let o = sdnnf(&["count", s(&circuit)]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), brute(FORMULA, &[], true).to_string());

    let o = sdnnf(&["verify", s(&circuit), "--cnf", s(&cnf)]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let text = stdout(&o);
    assert!(text.contains("structured ok"));
    assert!(text.contains("deterministic ok"));
    assert!(text.contains("cnf ok"));
    assert_eq!(stat(&text, "width "), width);
    assert_eq!(stat(&text, "gates "), gates);
}

#[test]
fn double_negation_is_equivalent() {
    let dir = TempDir::new().unwrap();
    let cnf = write(&dir, "f.cnf", FORMULA);
    assert_eq!(sdnnf(&["compile", s(&cnf)]).status.code(), Some(0));
    let c = dir.path().join("f.sdnnf");
    let n1 = dir.path().join("n1");
    let n2 = dir.path().join("n2");
    assert_eq!(sdnnf(&["project", s(&c), "--mode", "negate", "-o", s(&n1)]).status.code(), Some(0));
    let n1c = dir.path().join("n1.sdnnf");
    assert_eq!(stdout(&sdnnf(&["count", s(&n1c)])).trim(), (16 - brute(FORMULA, &[], true)).to_string());
    assert_eq!(sdnnf(&["project", s(&n1c), "--mode", "negate", "-o", s(&n2)]).status.code(), Some(0));
    let o = sdnnf(&["verify", s(&dir.path().join("n2.sdnnf")), "--equiv", s(&c)]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("equiv ok"));
    // The single negation is not equivalent.
    let o = sdnnf(&["verify", s(&n1c), "--equiv", s(&c)]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn projection_modes() {
    let dir = TempDir::new().unwrap();
    let cnf = write(&dir, "f.cnf", FORMULA);
    assert_eq!(sdnnf(&["compile", s(&cnf)]).status.code(), Some(0));
    let c = dir.path().join("f.sdnnf");
    let exists = sdnnf(&["project", s(&c), "--vars", "1,2"]);
    assert_eq!(exists.status.code(), Some(0));
    let o = sdnnf(&["count", s(&dir.path().join("f.exists.sdnnf")), "--output-name", "exists"]);
    let expected = brute(FORMULA, &[1, 2], true);
    assert_eq!(stdout(&o).trim(), expected.to_string());
    let o = sdnnf(&["project", s(&c), "--vars", "1,2", "--mode", "forall"]);
    assert_eq!(o.status.code(), Some(0));
    let o = sdnnf(&["count", s(&dir.path().join("f.forall.sdnnf")), "--output-name", "exists"]);
    assert_eq!(stdout(&o).trim(), brute(FORMULA, &[1, 2], false).to_string());
}

/// Models of the CNF text after eliminating `z`, over the remaining variables.
fn brute(text: &str, z: &[u32], exists: bool) -> u32 {
    let f = sdnnf::dimacs::parse_dimacs(text).unwrap();
    let sat = |a: u32| f.eval(|v| (a >> (v - 1)) & 1 == 1);
    let mask: u32 = z.iter().map(|v| 1 << (v - 1)).sum();
    (0..16u32)
        .filter(|&a| {
            let mut ext = (0..16u32).filter(|e| e & !mask == 0).map(|e| sat((a & !mask) | e));
            if exists {
                ext.any(|b| b)
            } else {
                ext.all(|b| b)
            }
        })
        .count() as u32
        >> z.len()
}

#[test]
fn constant_formulas() {
    let dir = TempDir::new().unwrap();
    let taut = write(&dir, "t.cnf", "p cnf 3 0\n");
    assert_eq!(sdnnf(&["compile", s(&taut)]).status.code(), Some(0));
    assert_eq!(stdout(&sdnnf(&["count", s(&dir.path().join("t.sdnnf"))])).trim(), "8");
    let contra = write(&dir, "c.cnf", "p cnf 2 2\n1 0\n-1 0\n");
    assert_eq!(sdnnf(&["compile", s(&contra)]).status.code(), Some(0));
    assert_eq!(stdout(&sdnnf(&["count", s(&dir.path().join("c.sdnnf"))])).trim(), "0");
}

#[test]
fn qbf_exit_codes() {
    let dir = TempDir::new().unwrap();
    let t = write(&dir, "t.qdimacs", "p cnf 2 2\na 1 0\ne 2 0\n1 2 0\n-1 -2 0\n");
    let f = write(&dir, "f.qdimacs", "p cnf 2 2\ne 2 0\na 1 0\n1 2 0\n-1 -2 0\n");
    let open = write(&dir, "o.qdimacs", "p cnf 3 2\ne 3 0\n1 3 0\n2 -3 0\n");
    for engine in ["dnnf", "obdd"] {
        let o = sdnnf(&["qbf", s(&t), "--engine", engine]);
        assert_eq!(o.status.code(), Some(10));
        assert_eq!(stdout(&o).trim(), "TRUE");
        let o = sdnnf(&["qbf", s(&f), "--engine", engine]);
        assert_eq!(o.status.code(), Some(20));
        assert_eq!(stdout(&o).trim(), "FALSE");
        let o = sdnnf(&["qbf", s(&open), "--engine", engine]);
        assert_eq!(o.status.code(), Some(0));
        assert_eq!(stdout(&o).trim(), "3");
    }
    let o = sdnnf(&["qbf", s(&t), "--stage-stats"]);
    let stages = stdout(&o).lines().filter(|l| l.starts_with("stage ")).count();
    assert_eq!(stages, 4);
}

#[test]
fn error_exit_codes() {
    let dir = TempDir::new().unwrap();
    let bad = write(&dir, "bad.cnf", "p cnf 2 1\n1 5 0\n");
    let o = sdnnf(&["compile", s(&bad)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 2"));

    let cnf = write(&dir, "f.cnf", FORMULA);
    assert_eq!(sdnnf(&["compile", s(&cnf), "--max-width", "1"]).status.code(), Some(3));
    assert_eq!(sdnnf(&["compile", s(&cnf), "--max-gates", "3"]).status.code(), Some(3));
    assert_eq!(sdnnf(&["compile", s(&dir.path().join("missing.cnf"))]).status.code(), Some(1));
    assert_ne!(sdnnf(&["frobnicate"]).status.code(), Some(0));
}

#[test]
fn corrupted_home_is_rejected() {
    let dir = TempDir::new().unwrap();
    let cnf = write(&dir, "f.cnf", FORMULA);
    assert_eq!(sdnnf(&["compile", s(&cnf)]).status.code(), Some(0));
    let path = dir.path().join("f.sdnnf");
    let text = std::fs::read_to_string(&path).unwrap();
    // Move one And gate to the vtree root.
    let root: usize = std::fs::read_to_string(dir.path().join("f.vtree"))
        .unwrap()
        .lines()
        .rfind(|l| !l.trim().is_empty() && !l.starts_with('c'))
        .and_then(|l| l.split_whitespace().nth(1).map(|x| x.parse().unwrap()))
        .unwrap();
    let mut moved = false;
    let lines: Vec<String> = text
        .lines()
        .map(|l| {
            let toks: Vec<&str> = l.split_whitespace().collect();
            if !moved && toks.first() == Some(&"A") && toks[4] != root.to_string() {
                moved = true;
                format!("A {} {} {} {}", toks[1], toks[2], toks[3], root)
            } else {
                l.to_string()
            }
        })
        .collect();
    assert!(moved);
    std::fs::write(&path, lines.join("\n") + "\n").unwrap();
    let o = sdnnf(&["verify", s(&path)]);
    assert_ne!(o.status.code(), Some(0));
    assert_ne!(sdnnf(&["count", s(&path)]).status.code(), Some(0));
}

#[test]
fn json_stats() {
    let dir = TempDir::new().unwrap();
    let cnf = write(&dir, "f.cnf", FORMULA);
    let o = sdnnf(&["compile", s(&cnf), "--stats-json"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    for key in ["width", "gates", "vtree_nodes", "maxbag", "stage_widths", "wall_ms"] {
        assert!(v.get(key).is_some(), "missing {key}");
    }
    let q = write(&dir, "t.qdimacs", "p cnf 2 2\na 1 0\ne 2 0\n1 2 0\n-1 -2 0\n");
    let o = sdnnf(&["qbf", s(&q), "--stats-json"]);
    assert_eq!(o.status.code(), Some(10));
    let json = stdout(&o).lines().find(|l| l.starts_with('{')).unwrap().to_string();
    let v: serde_json::Value = serde_json::from_str(&json).unwrap();
    assert_eq!(v["stage_widths"].as_array().unwrap().len(), 4);
}
