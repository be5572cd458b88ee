//! Golden reports for the corpus. Set `YAGZHEV_BLESS=1` to rewrite them.

mod common;

use std::fs;

use common::{cases, golden_path, root, run};

#[test]
fn reports_match_golden_files() {
    let bless = std::env::var_os("YAGZHEV_BLESS").is_some();
    let mut mismatches = Vec::new();
    for (name, args) in cases() {
        let args: Vec<&str> = args.iter().map(String::as_str).collect();
        let out = run(&args);
        assert!(
            out.status.success(),
            "{name}: {}",
            String::from_utf8_lossy(&out.stderr)
        );
        let path = golden_path(&name);
        if bless {
            fs::write(&path, &out.stdout).unwrap();
            continue;
        }
        let expected =
            fs::read(&path).unwrap_or_else(|_| panic!("missing golden file {}", path.display()));
        if expected != out.stdout {
            mismatches.push(name);
        }
    }
    assert!(
        mismatches.is_empty(),
        "reports differ from golden files: {mismatches:?}"
    );
}

#[test]
fn every_golden_file_has_a_case() {
    let names: Vec<String> = cases().into_iter().map(|(n, _)| n).collect();
    for entry in fs::read_dir(root().join("corpus/golden")).unwrap() {
        let file = entry.unwrap().file_name().into_string().unwrap();
        let stem = file.rsplit_once('.').unwrap().0;
        assert!(names.iter().any(|n| n == stem), "stale golden file {file}");
    }
}
