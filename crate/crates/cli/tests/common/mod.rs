//! Shared by the golden and acceptance targets.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

pub fn root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..")
}

pub fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_yagzhev"))
        .args(args)
        .current_dir(root())
        .env_remove("YAGZHEV_MAX_DEGREE")
        .output()
        .expect("binary runs")
}

pub const MAPS: &[&str] = &[
    "nagata",
    "charp5",
    "derived/charp5-cubic",
    "druzkowski-invertible",
    "druzkowski-diagonal",
    "wang-1",
    "wang-2",
    "elementary",
    "x-plus-x4",
    "x-minus-x2",
];

/// `(golden file stem, arguments)` for every checked-in report.
pub fn cases() -> Vec<(String, Vec<String>)> {
    let mut out = Vec::new();
    for m in MAPS {
        let path = format!("corpus/{m}.pmap");
        for (tag, args) in [
            ("invert", vec!["invert"]),
            ("jacobian", vec!["jacobian"]),
            ("engel", vec!["check", "engel"]),
            ("yagzhev", vec!["check", "yagzhev"]),
        ] {
            let mut a: Vec<String> = args.iter().map(|s| s.to_string()).collect();
            a.push(path.clone());
            out.push((format!("{}.{tag}", m.replace('/', "-")), a));
        }
    }
    let extra: &[(&str, &[&str])] = &[
        (
            "x-plus-x4.reduce-cubic",
            &["reduce-cubic", "corpus/x-plus-x4.pmap"],
        ),
        (
            "druzkowski-invertible.blowup",
            &["blowup", "corpus/druzkowski-invertible.pmap"],
        ),
        (
            "elementary.embed-prime",
            &["embed", "prime", "corpus/elementary.pmap"],
        ),
        (
            "dual-numbers.realize",
            &[
                "realize",
                "corpus/dual-numbers.oalg",
                "corpus/dual-square.exprs",
            ],
        ),
        (
            "matrices-2x2.simplicity",
            &["simplicity", "corpus/matrices-2x2.oalg"],
        ),
        (
            "componentwise.simplicity",
            &["simplicity", "corpus/componentwise.oalg"],
        ),
        (
            "capelli-counterexample.capelli",
            &[
                "check",
                "capelli",
                "corpus/capelli-counterexample.oalg",
                "--order",
                "2",
                "--bound",
                "3",
            ],
        ),
        (
            "nagata.text",
            &["--format", "text", "invert", "corpus/nagata.pmap"],
        ),
    ];
    for (name, args) in extra {
        out.push((
            name.to_string(),
            args.iter().map(|s| s.to_string()).collect(),
        ));
    }
    out
}

pub fn golden_path(name: &str) -> PathBuf {
    let ext = if name.ends_with(".text") {
        "txt"
    } else {
        "json"
    };
    root().join("corpus/golden").join(format!("{name}.{ext}"))
}
