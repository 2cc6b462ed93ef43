use std::path::Path;
use std::process::Command;

fn include_dir() -> &'static Path {
    Path::new(concat!(env!("CARGO_MANIFEST_DIR"), "/include"))
}

#[test]
fn header_declares_every_export() {
    let header = std::fs::read_to_string(include_dir().join("anticonc.h")).unwrap();
    for name in [
        "ac_last_error",
        "ac_version",
        "ac_poly_parse",
        "ac_poly_free",
        "ac_poly_dim",
        "ac_poly_degree",
        "ac_poly_evaluate",
        "ac_poly_coeff_level",
        "ac_poly_to_string",
        "ac_string_free",
        "ac_ortho_new",
        "ac_ortho_free",
        "ac_ortho_maxdeg",
        "ac_ortho_constant",
        "ac_ball_spectrum_theoretical",
        "ac_ball_spectrum_empirical",
        "ac_ball_isotropic_scale",
        "ac_gamma_ratio_moment",
        "ac_norm_power_variance",
        "ac_variance_mc",
        "AC_STATUS_BUFFER_TOO_SMALL",
        "typedef struct AcEstimate",
    ] {
        assert!(header.contains(name), "header is missing {name}");
    }
}

/// Compiles a small C program against the header when a C compiler exists.
#[test]
fn header_compiles_as_c() {
    let cc = std::env::var("CC").unwrap_or_else(|_| "cc".into());
    let smoke = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/smoke.c");
    let status = match Command::new(&cc)
        .args(["-std=c99", "-Wall", "-Werror", "-fsyntax-only", "-I"])
        .arg(include_dir())
        .arg(&smoke)
        .status()
    {
        Ok(s) => s,
        Err(e) => {
            eprintln!("skipping: cannot run {cc}: {e}");
            return;
        }
    };
    assert!(status.success(), "{cc} rejected the header");
}
