//! Compiles a small C program against the generated header and the shared
//! library, then runs it.

use std::path::PathBuf;
use std::process::Command;

const PROGRAM: &str = r#"
#include <math.h>
#include <stdio.h>
#include "nlsist.h"

int main(void) {
    enum { N = 1025 };
    static double samples[2 * N];
    for (int i = 0; i < N; i++) {
        double x = -25.0 + 50.0 * i / (N - 1);
        samples[2 * i] = 1.0 / cosh(x);
        samples[2 * i + 1] = 0.0;
    }
    NlsistField *u = NULL;
    if (nlsist_field_new(-25.0, 25.0, N, samples, &u) != NLSIST_STATUS_OK) return 1;
    NlsistSpectral *data = NULL;
    if (nlsist_scatter(u, -2.0, 2.0, 21, &data) != NLSIST_STATUS_OK) { fprintf(stderr, "%s\n", nlsist_last_error()); return 2; }
    uintptr_t count = 0;
    nlsist_spectral_eigen_count(data, &count);
    double pair[4];
    nlsist_spectral_eigenpair(data, 0, pair);
    printf("%lu %.9f %.9f\n", (unsigned long)count, pair[0], pair[1]);
    if (nlsist_field_new(1.0, 0.0, N, samples, &u) != NLSIST_STATUS_INVALID_ARGUMENT) return 3;
    nlsist_spectral_free(data);
    nlsist_field_free(u);
    return 0;
}
"#;

fn library_dir() -> PathBuf {
    // target/<profile>/deps/<test binary>
    let exe = std::env::current_exe().unwrap();
    exe.parent().and_then(|d| d.parent()).unwrap().to_path_buf()
}

#[test]
fn c_program_links_and_runs() {
    let lib_dir = library_dir();
    assert!(lib_dir.join("libnlsist_ffi.so").exists(), "shared library missing in {}", lib_dir.display());
    let include = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("include");
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("main.c");
    let bin = dir.path().join("main");
    std::fs::write(&src, PROGRAM).unwrap();
    let status = Command::new("cc")
        .arg("-std=c99")
        .arg("-Wall")
        .arg("-Werror")
        .arg(&src)
        .arg("-I")
        .arg(&include)
        .arg("-L")
        .arg(&lib_dir)
        .arg(format!("-Wl,-rpath,{}", lib_dir.display()))
        .args(["-lnlsist_ffi", "-lm", "-o"])
        .arg(&bin)
        .status()
        .unwrap();
    assert!(status.success());
    let out = Command::new(&bin).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    let fields: Vec<f64> = text.split_whitespace().map(|s| s.parse().unwrap()).collect();
    assert_eq!(fields[0], 1.0);
    assert!(fields[1].abs() < 1e-6 && (fields[2] - 0.5).abs() < 1e-6, "{text}");
}
