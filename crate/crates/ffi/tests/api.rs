use std::ffi::{CStr, CString};
use std::ptr;

use hornopt_ffi::*;

unsafe fn take_string(p: *mut std::ffi::c_char) -> String {
    let s = CStr::from_ptr(p).to_str().unwrap().to_owned();
    hornopt_string_free(p);
    s
}

unsafe fn last_error() -> String {
    CStr::from_ptr(hornopt_last_error_message()).to_str().unwrap().to_owned()
}

unsafe fn parse(src: &str) -> *mut HornoptPolynomial {
    let src = CString::new(src).unwrap();
    let mut p = ptr::null_mut();
    assert_eq!(hornopt_polynomial_parse(src.as_ptr(), &mut p), HornoptStatus::Ok);
    p
}

#[test]
fn parse_count_and_print() {
    unsafe {
        let p = parse("x^2*z + x^3*y + x^3*y*z");
        assert_eq!(hornopt_polynomial_num_vars(p), 3);
        assert_eq!(hornopt_polynomial_num_terms(p), 3);
        let mut ops = HornoptOpCount::default();
        assert_eq!(hornopt_polynomial_expanded_ops(p, &mut ops), HornoptStatus::Ok);
        assert_eq!((ops.muls, ops.adds), (9, 2));
        let mut s = ptr::null_mut();
        assert_eq!(hornopt_polynomial_to_string(p, &mut s), HornoptStatus::Ok);
        let text = take_string(s);
        let q = parse(&text);
        assert_eq!(hornopt_polynomial_num_terms(q), 3);
        hornopt_polynomial_free(q);
        hornopt_polynomial_free(p);
    }
}

#[test]
fn simplify_matches_library() {
    unsafe {
        let p = parse("x^2*z + x^3*y + x^3*y*z");
        let mut cfg = hornopt_search_config_default();
        cfg.strategy = HornoptStrategy::Exhaustive;
        let mut r = ptr::null_mut();
        assert_eq!(hornopt_simplify(p, &cfg, &mut r), HornoptStatus::Ok);
        assert_eq!(hornopt_result_evaluations(r), 6);

        let lib = hornopt::exhaustive_search(
            &hornopt::Polynomial::parse("x^2*z + x^3*y + x^3*y*z").unwrap(),
            hornopt::Direction::Forward,
        )
        .unwrap();
        let mut ops = HornoptOpCount::default();
        assert_eq!(hornopt_result_ops(r, &mut ops), HornoptStatus::Ok);
        assert_eq!((ops.muls, ops.adds), (lib.best_ops.muls, lib.best_ops.adds));

        let mut s = ptr::null_mut();
        assert_eq!(hornopt_result_scheme(r, &mut s), HornoptStatus::Ok);
        assert_eq!(take_string(s).split(',').count(), 3);

        let target = CString::new("out").unwrap();
        assert_eq!(hornopt_result_emit_code(r, target.as_ptr(), &mut s), HornoptStatus::Ok);
        let code = take_string(s);
        assert_eq!(code.lines().count() as u64, ops.muls + ops.adds + 1);
        assert!(code.lines().last().unwrap().starts_with("out = "), "{code}");

        hornopt_result_free(r);
        hornopt_polynomial_free(p);
    }
}

#[test]
fn mcts_is_deterministic() {
    unsafe {
        let mut p = ptr::null_mut();
        assert_eq!(hornopt_gen_res(3, 2, &mut p), HornoptStatus::Ok);
        assert_eq!(hornopt_polynomial_num_vars(p), 7);
        let mut cfg = hornopt_search_config_default();
        cfg.strategy = HornoptStrategy::MctsSaUct;
        cfg.iterations = 50;
        cfg.seed = 11;
        let run = || {
            let mut r = ptr::null_mut();
            assert_eq!(hornopt_simplify(p, &cfg, &mut r), HornoptStatus::Ok);
            let mut s = ptr::null_mut();
            hornopt_result_scheme(r, &mut s);
            let mut ops = HornoptOpCount::default();
            hornopt_result_ops(r, &mut ops);
            assert_eq!(hornopt_result_evaluations(r), 50);
            hornopt_result_free(r);
            (take_string(s), ops)
        };
        assert_eq!(run(), run());
        hornopt_polynomial_free(p);
    }
}

#[test]
fn errors_set_status_and_message() {
    unsafe {
        let mut p = ptr::null_mut();
        let bad = CString::new("x^0 + y").unwrap();
        assert_eq!(hornopt_polynomial_parse(bad.as_ptr(), &mut p), HornoptStatus::Parse);
        assert!(p.is_null());
        assert!(last_error().contains("1:3"), "{}", last_error());

        assert_eq!(hornopt_polynomial_parse(ptr::null(), &mut p), HornoptStatus::NullPointer);
        assert_eq!(hornopt_gen_res(9, 9, &mut p), HornoptStatus::Limit);
        assert!(!last_error().is_empty());

        let invalid = [0xffu8, 0];
        assert_eq!(
            hornopt_polynomial_parse(invalid.as_ptr().cast(), &mut p),
            HornoptStatus::InvalidUtf8
        );

        let q = parse("a*b + c");
        let mut cfg = hornopt_search_config_default();
        cfg.strategy = HornoptStrategy::MctsUct;
        cfg.cp = -1.0;
        let mut r = ptr::null_mut();
        assert_eq!(hornopt_simplify(q, &cfg, &mut r), HornoptStatus::InvalidArgument);
        assert!(r.is_null());
        assert_eq!(hornopt_simplify(q, ptr::null(), &mut r), HornoptStatus::NullPointer);

        assert_eq!(hornopt_polynomial_num_vars(ptr::null()), 0);
        hornopt_polynomial_free(ptr::null_mut());
        hornopt_result_free(ptr::null_mut());
        hornopt_string_free(ptr::null_mut());
        hornopt_polynomial_free(q);
    }
}
