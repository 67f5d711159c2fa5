//! Compiles a small C program against the generated header and the static
//! library, then runs it.

use std::path::PathBuf;
use std::process::Command;

const PROGRAM: &str = r#"
#include <stdio.h>
#include <string.h>
#include "hornopt.h"

int main(void) {
    HornoptPolynomial *p = NULL;
    if (hornopt_polynomial_parse("x^2*z + x^3*y + x^3*y*z", &p) != HORNOPT_STATUS_OK) return 10;
    HornoptSearchConfig cfg = hornopt_search_config_default();
    cfg.strategy = HORNOPT_STRATEGY_EXHAUSTIVE;
    HornoptResult *r = NULL;
    if (hornopt_simplify(p, &cfg, &r) != HORNOPT_STATUS_OK) return 11;
    HornoptOpCount ops;
    if (hornopt_result_ops(r, &ops) != HORNOPT_STATUS_OK) return 12;
    char *code = NULL;
    if (hornopt_result_emit_code(r, "out", &code) != HORNOPT_STATUS_OK) return 13;
    printf("ops=%llu,%llu evals=%llu\n", (unsigned long long)ops.muls,
           (unsigned long long)ops.adds, (unsigned long long)hornopt_result_evaluations(r));
    hornopt_string_free(code);
    hornopt_result_free(r);
    hornopt_polynomial_free(p);

    HornoptPolynomial *bad = NULL;
    if (hornopt_polynomial_parse("x^0", &bad) != HORNOPT_STATUS_PARSE) return 14;
    if (strlen(hornopt_last_error_message()) == 0) return 15;
    return 0;
}
"#;

#[test]
fn c_program_links_and_runs() {
    let deps = std::env::current_exe().unwrap().parent().unwrap().to_path_buf();
    let staticlib = deps.parent().unwrap().join("libhornopt_ffi.a");
    let staticlib = if staticlib.exists() { staticlib } else { deps.join("libhornopt_ffi.a") };
    assert!(staticlib.exists(), "static library not found near {}", deps.display());

    let include = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("include");
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("smoke.c");
    let exe = dir.path().join("smoke");
    std::fs::write(&src, PROGRAM).unwrap();

    let cc = std::env::var("CC").unwrap_or_else(|_| "cc".into());
    let status = Command::new(cc)
        .arg("-std=c99")
        .arg("-Wall")
        .arg("-Werror")
        .arg("-I")
        .arg(&include)
        .arg(&src)
        .arg(&staticlib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&exe)
        .status()
        .expect("C compiler runs");
    assert!(status.success());

    let out = Command::new(&exe).output().unwrap();
    assert!(out.status.success(), "exit {:?}", out.status.code());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("ops=") && text.trim_end().ends_with("evals=6"), "{text}");
}
