//! Compiles and runs a C program against the generated header and static library.

use std::path::PathBuf;
use std::process::Command;

#[test]
fn c_program_links_and_runs() {
    let Ok(cc) = which_cc() else {
        eprintln!("no C compiler found; skipping");
        return;
    };
    let manifest = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    // test binaries live in <target>/<profile>/deps
    let exe = std::env::current_exe().unwrap();
    let lib_dir = exe.parent().unwrap().parent().unwrap().to_path_buf();
    let lib = lib_dir.join("libeinclass_ffi.a");
    assert!(lib.exists(), "static library missing at {}", lib.display());
    let out = std::env::temp_dir().join(format!("einclass_smoke_{}", std::process::id()));
    let status = Command::new(&cc)
        .arg(manifest.join("tests/smoke.c"))
        .arg("-I")
        .arg(manifest.join("include"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success(), "C compile failed");
    let run = Command::new(&out).output().unwrap();
    let _ = std::fs::remove_file(&out);
    assert!(run.status.success(), "C program exited with {:?}: {}", run.status.code(), String::from_utf8_lossy(&run.stderr));
    assert!(String::from_utf8_lossy(&run.stdout).starts_with("ok "));
}

fn which_cc() -> Result<String, ()> {
    for cand in ["cc", "gcc", "clang"] {
        if Command::new(cand).arg("--version").output().is_ok_and(|o| o.status.success()) {
            return Ok(cand.to_string());
        }
    }
    Err(())
}
