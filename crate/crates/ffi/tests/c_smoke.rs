use std::path::PathBuf;
use std::process::Command;

/// Compiles `examples/smoke.c` against the generated header and the static
/// library, then runs it.
#[test]
fn c_program_links_and_runs() {
    let manifest = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    // target/<profile>/deps/<test> -> target/<profile>
    let profile_dir = std::env::current_exe().unwrap().parent().unwrap().parent().unwrap().to_path_buf();
    let lib = profile_dir.join("libonelevel_ffi.a");
    assert!(lib.exists(), "missing {}", lib.display());
    let exe = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("onelevel_smoke");
    let status = Command::new("cc")
        .arg(manifest.join("examples/smoke.c"))
        .arg("-I")
        .arg(manifest.join("include"))
        .arg(&lib)
        .args(["-lm", "-lpthread", "-ldl", "-o"])
        .arg(&exe)
        .status()
        .expect("a C compiler on PATH");
    assert!(status.success());
    let out = Command::new(&exe).output().unwrap();
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(out.status.success(), "{text}");
    assert!(text.contains("U: status 3"), "{text}");
}
