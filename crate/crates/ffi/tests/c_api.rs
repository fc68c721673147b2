use std::ffi::{CStr, CString};
use std::process::Command;
use std::ptr;

use mule_gather_ffi::*;

fn path_graph() -> *mut MgGraph {
    let xs = [0.0, 1.0, 2.0, 3.0];
    let ys = [0.0; 4];
    let mut g = ptr::null_mut();
    assert_eq!(unsafe { mg_graph_from_points(xs.as_ptr(), ys.as_ptr(), 4, &mut g) }, MgStatus::Ok);
    g
}

fn last_error() -> String {
    let p = mg_last_error_message();
    assert!(!p.is_null());
    let s = unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned();
    unsafe { mg_string_free(p) };
    s
}

#[test]
fn solve_path_through_the_c_api() {
    let g = path_graph();
    assert_eq!(unsafe { mg_graph_node_count(g) }, 4);
    let mut s = ptr::null_mut();
    assert_eq!(unsafe { mg_solve(g, 0.2, MgPolicy::FullScan, 0, &mut s) }, MgStatus::Ok);

    let mut sum = MgSummary {
        mule: 0,
        root: 0,
        cds_size: 0,
        weight_cds: 0.0,
        lower_bound: 0.0,
        alpha: 0.0,
        alpha_valid: false,
        lb_valid: false,
    };
    assert_eq!(unsafe { mg_solution_summary(s, &mut sum) }, MgStatus::Ok);
    assert!(sum.alpha_valid && sum.alpha <= 20.0);
    assert!(sum.mule == 1 || sum.mule == 2);

    let mut parents = [0i64; 4];
    assert_eq!(unsafe { mg_solution_parents(s, parents.as_mut_ptr(), 4) }, MgStatus::Ok);
    assert_eq!(parents.iter().filter(|&&p| p == -1).count(), 1);
    assert_eq!(parents[sum.root], -1);

    let mut nodes = [0usize; 4];
    let mut len = 0;
    assert_eq!(unsafe { mg_solution_cds(s, nodes.as_mut_ptr(), 4, &mut len) }, MgStatus::Ok);
    assert_eq!(len, sum.cds_size);
    assert!(nodes[..len].contains(&1) && nodes[..len].contains(&2));

    let mut cost = 0.0;
    assert_eq!(unsafe { mg_solution_cost(g, s, &mut cost) }, MgStatus::Ok);
    assert!(cost > 0.0);

    let mut json = ptr::null_mut();
    assert_eq!(unsafe { mg_solution_to_json(s, &mut json) }, MgStatus::Ok);
    let text = unsafe { CStr::from_ptr(json) }.to_str().unwrap().to_owned();
    unsafe { mg_string_free(json) };
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["mule"].as_u64().unwrap() as usize, sum.mule);

    unsafe {
        mg_solution_free(s);
        mg_graph_free(g);
    }
}

#[test]
fn errors_carry_codes_and_messages() {
    let mut g = ptr::null_mut();
    let status = unsafe { mg_graph_generate(4.0, 0.001, 1, 10, &mut g) };
    assert_eq!(status, MgStatus::GenerationFailed);
    assert!(g.is_null());
    assert!(last_error().contains("zero nodes"));

    let status = unsafe { mg_graph_generate(10_000.0, 0.01, 1, 20, &mut g) };
    assert_eq!(status, MgStatus::GenerationFailed);

    let mut c = 0.0;
    assert_eq!(unsafe { mg_weight_constant(0.3, &mut c) }, MgStatus::RangeOutOfBounds);
    assert_eq!(unsafe { mg_weight_constant(0.2, &mut c) }, MgStatus::Ok);
    assert!((c - (3.2 + 3.6 * std::f64::consts::PI)).abs() < 1e-12);

    let mut s = ptr::null_mut();
    assert_eq!(unsafe { mg_solve(ptr::null(), 0.2, MgPolicy::FullScan, 0, &mut s) }, MgStatus::NullPointer);

    let xs = [0.0, 5.0];
    let ys = [0.0, 0.0];
    assert_eq!(unsafe { mg_graph_from_points(xs.as_ptr(), ys.as_ptr(), 2, &mut g) }, MgStatus::Ok);
    assert_eq!(unsafe { mg_solve(g, 0.2, MgPolicy::FullScan, 0, &mut s) }, MgStatus::Disconnected);
    unsafe { mg_graph_free(g) };

    let g = path_graph();
    assert_eq!(unsafe { mg_solve(g, 0.2, MgPolicy::FixedNode, 1, &mut s) }, MgStatus::Ok);
    let mut small = [0i64; 2];
    assert_eq!(unsafe { mg_solution_parents(s, small.as_mut_ptr(), 2) }, MgStatus::BufferTooSmall);
    let mut len = 0;
    assert_eq!(unsafe { mg_solution_cds(s, ptr::null_mut(), 0, &mut len) }, MgStatus::BufferTooSmall);
    assert!(len >= 2);
    unsafe {
        mg_solution_free(s);
        mg_graph_free(g);
    }
}

#[test]
fn reads_graph_files() {
    let dir = std::env::temp_dir().join(format!("mg-ffi-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let file = dir.join("g.txt");
    std::fs::write(&file, "2\n0 0.0 0.0\n1 0.5 0.0\n").unwrap();
    let path = CString::new(file.to_str().unwrap()).unwrap();
    let mut g = ptr::null_mut();
    assert_eq!(unsafe { mg_graph_read_file(path.as_ptr(), &mut g) }, MgStatus::Ok);
    let (mut x, mut y) = (0.0, 0.0);
    assert_eq!(unsafe { mg_graph_point(g, 1, &mut x, &mut y) }, MgStatus::Ok);
    assert_eq!((x, y), (0.5, 0.0));
    unsafe { mg_graph_free(g) };

    let missing = CString::new(dir.join("missing.txt").to_str().unwrap()).unwrap();
    assert_eq!(unsafe { mg_graph_read_file(missing.as_ptr(), &mut g) }, MgStatus::Io);
    std::fs::write(&file, "2\n0 0.0 0.0\n").unwrap();
    assert_eq!(unsafe { mg_graph_read_file(path.as_ptr(), &mut g) }, MgStatus::Parse);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn version_is_nul_terminated() {
    let v = unsafe { CStr::from_ptr(mg_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
}

#[test]
fn header_declares_every_export_and_compiles() {
    let header = concat!(env!("CARGO_MANIFEST_DIR"), "/include/mule_gather.h");
    let text = std::fs::read_to_string(header).unwrap();
    for f in [
        "mg_version",
        "mg_last_error_message",
        "mg_string_free",
        "mg_graph_from_points",
        "mg_graph_generate",
        "mg_graph_read_file",
        "mg_graph_node_count",
        "mg_graph_point",
        "mg_graph_free",
        "mg_weight_constant",
        "mg_solve",
        "mg_solution_free",
        "mg_solution_summary",
        "mg_solution_parents",
        "mg_solution_cds",
        "mg_solution_cost",
        "mg_solution_to_json",
    ] {
        assert!(text.contains(&format!("{f}(")), "{f} missing from header");
    }
    // Syntax-check the header when a C compiler is present.
    if let Ok(out) = Command::new("cc").args(["-fsyntax-only", "-x", "c", header]).output() {
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    }
}
