macro_rules! assert_close {
    ($a:expr, $b:expr, $tol:expr) => {{
        let (a, b): (f64, f64) = ($a, $b);
        assert!((a - b).abs() <= $tol, "{} vs {} (tol {})", a, b, $tol);
    }};
}

macro_rules! assert_mat_close {
    ($a:expr, $b:expr, $tol:expr) => {{
        let d = $a.distance(&$b).unwrap();
        assert!(d <= $tol, "matrices differ by {:e} (tol {:e})", d, $tol);
    }};
}
