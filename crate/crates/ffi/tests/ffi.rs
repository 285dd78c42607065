use std::ffi::{CStr, CString};
use std::ptr;

use excluwall_ffi::*;

fn last_error() -> String {
    unsafe { CStr::from_ptr(excl_last_error()) }.to_string_lossy().into_owned()
}

#[test]
fn simulate_through_handles() {
    unsafe {
        let mut clocks = ptr::null_mut();
        assert_eq!(excl_clockfield_new(9, 5.0, &mut clocks), ExclStatus::Ok);
        let knots = [0.0, 0.0, 0.0, 5.0, 2.5, 0.0];
        let mut wall = ptr::null_mut();
        assert_eq!(excl_wall_new(knots.as_ptr(), 2, &mut wall), ExclStatus::Ok);
        let mut v = 0.0;
        assert_eq!(excl_wall_eval(wall, 2.0, &mut v), ExclStatus::Ok);
        assert_eq!(v, 1.0);

        let x0 = [0i64, -1, -2];
        let mut traj = ptr::null_mut();
        assert_eq!(excl_simulate(x0.as_ptr(), 3, wall, 5.0, clocks, &mut traj), ExclStatus::Ok);
        assert_eq!(excl_trajectory_len(traj), 3);
        let mut fin = [0i64; 3];
        assert_eq!(excl_trajectory_final_positions(traj, fin.as_mut_ptr(), 3), ExclStatus::Ok);
        assert!(fin[0] <= 2 && fin[0] > fin[1] && fin[1] > fin[2]);
        let mut x = 0;
        assert_eq!(excl_trajectory_position(traj, 1, 0.0, &mut x), ExclStatus::Ok);
        assert_eq!(x, 0);
        assert_eq!(
            excl_trajectory_final_positions(traj, fin.as_mut_ptr(), 2),
            ExclStatus::BufferTooSmall
        );
        assert_eq!(excl_trajectory_position(traj, 4, 1.0, &mut x), ExclStatus::OutOfRange);

        // same seed, same clocks: the run is reproducible
        let mut clocks2 = ptr::null_mut();
        excl_clockfield_new(9, 5.0, &mut clocks2);
        let mut traj2 = ptr::null_mut();
        excl_simulate(x0.as_ptr(), 3, wall, 5.0, clocks2, &mut traj2);
        let mut fin2 = [0i64; 3];
        excl_trajectory_final_positions(traj2, fin2.as_mut_ptr(), 3);
        assert_eq!(fin, fin2);

        excl_trajectory_free(traj);
        excl_trajectory_free(traj2);
        excl_wall_free(wall);
        excl_clockfield_free(clocks);
        excl_clockfield_free(clocks2);
        excl_trajectory_free(ptr::null_mut());
    }
}

#[test]
fn errors_carry_codes_and_messages() {
    unsafe {
        let mut clocks = ptr::null_mut();
        assert_eq!(excl_clockfield_new(1, f64::NAN, &mut clocks), ExclStatus::InvalidArgument);
        assert!(last_error().contains("horizon"));
        assert_eq!(excl_clockfield_new(1, 1.0, ptr::null_mut()), ExclStatus::NullPointer);

        let bad = [0.0, 1.0, 0.0, 1.0, 0.5, 0.0];
        let mut wall = ptr::null_mut();
        assert_eq!(excl_wall_new(bad.as_ptr(), 2, &mut wall), ExclStatus::InvalidArgument);

        excl_clockfield_new(1, 1.0, &mut clocks);
        let mut t = 0.0;
        let mut found = 0;
        assert_eq!(excl_clockfield_next_event(clocks, 0, 2.0, &mut t, &mut found), ExclStatus::OutOfRange);
        let x0 = [0i64, 0];
        let mut traj = ptr::null_mut();
        assert_eq!(
            excl_simulate(x0.as_ptr(), 2, ptr::null(), 1.0, clocks, &mut traj),
            ExclStatus::Precondition
        );
        excl_clockfield_free(clocks);

        let ic = CString::new(r#"{"kind":"nope"}"#).unwrap();
        let mut out = [0i64; 1];
        assert_eq!(
            excl_tagged_samples(ic.as_ptr(), ptr::null(), 1, 1.0, 1, 0, 1, out.as_mut_ptr()),
            ExclStatus::InvalidArgument
        );
        assert!(last_error().contains("initial condition"));
    }
}

#[test]
fn estimators_and_tables() {
    unsafe {
        let ic = CString::new(r#"{"kind":"step"}"#).unwrap();
        let mut xs = vec![0i64; 200];
        assert_eq!(
            excl_tagged_samples(ic.as_ptr(), ptr::null(), 1, 1.0, 200, 3, 2, xs.as_mut_ptr()),
            ExclStatus::Ok
        );
        assert!(xs.iter().all(|&x| x >= 0));

        let mut wall = ptr::null_mut();
        excl_wall_example(4.0, &mut wall);
        let mut est = ExclIdentityEstimate::default();
        assert_eq!(
            excl_estimate_identity(ic.as_ptr(), wall, 2, 4.0, -1, 2000, 5, 1, &mut est),
            ExclStatus::Ok
        );
        assert_eq!(est.verdict, 1);
        assert!(est.lhs_lo <= est.p_lhs && est.p_lhs <= est.lhs_hi);
        excl_wall_free(wall);

        let mut holds = 0;
        let word = [0i64, 1, 0, -2];
        assert_eq!(excl_colour_position_check(word.as_ptr(), 4, &mut holds), ExclStatus::Ok);
        assert_eq!(holds, 1);
        assert_eq!(excl_colour_position_check(ptr::null(), 0, &mut holds), ExclStatus::Ok);

        let mut r = ExclRegime::default();
        assert_eq!(excl_classify(1.0, 0.1, &mut r), ExclStatus::Ok);
        assert_eq!(r.law, 2);
        assert_eq!(r.n_scales, 2);
        assert!((r.xi - 11.0 / 30.0).abs() < 1e-12);
        assert_eq!(excl_classify(2.5, 0.2, &mut r), ExclStatus::InvalidArgument);

        let (mut lo, mut hi) = (0.0, 0.0);
        assert_eq!(excl_wilson_ci(0, 10, 0.99, &mut lo, &mut hi), ExclStatus::Ok);
        assert_eq!(lo, 0.0);
        assert!(hi > 0.0 && hi < 1.0);
        assert!(!CStr::from_ptr(excl_version()).to_bytes().is_empty());
    }
}

#[test]
fn header_declares_the_api() {
    let header = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/excluwall.h")).unwrap();
    for name in [
        "excl_clockfield_new",
        "excl_simulate",
        "excl_trajectory_final_positions",
        "excl_estimate_identity",
        "excl_classify",
        "excl_last_error",
        "EXCL_STATUS_BUFFER_TOO_SMALL",
        "typedef struct ExclWall ExclWall",
    ] {
        assert!(header.contains(name), "{name} missing from header");
    }
}

#[test]
fn header_compiles_as_c() {
    let dir = tempfile_dir();
    let src = dir.join("use_header.c");
    std::fs::write(
        &src,
        "#include \"excluwall.h\"\nint main(void) { ExclRegime r; return excl_classify(1.0, 0.1, &r) == EXCL_STATUS_OK ? 0 : 1; }\n",
    )
    .unwrap();
    let status = std::process::Command::new("cc")
        .args(["-fsyntax-only", "-Wall", "-Werror", "-I"])
        .arg(concat!(env!("CARGO_MANIFEST_DIR"), "/include"))
        .arg(&src)
        .status();
    match status {
        Ok(s) => assert!(s.success(), "header does not compile"),
        Err(_) => eprintln!("no C compiler; skipped"),
    }
}

fn tempfile_dir() -> std::path::PathBuf {
    let d = std::env::temp_dir().join(format!("excluwall-ffi-{}", std::process::id()));
    std::fs::create_dir_all(&d).unwrap();
    d
}
