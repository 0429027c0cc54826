use std::process::Command;

use traversal_lab::output::{emit_csv, emit_plot_script, format_g, parse_csv, plot_script, write_csv, CSV_HEADER};
use traversal_lab::ScanRow;

fn row(x: f64) -> ScanRow {
    ScanRow {
        axis_value: x,
        tau_vis: Some(1.0 / 3.0 + x),
        tau_wkb: Some(x),
        tau_nelson: Some(std::f64::consts::PI * x),
        tau_nelson_stderr: Some(1.234_567_890_123_4e-3),
        i_vis: Some(0.041_666_666_666_67),
        t_bar: Some(7.065_082_485_5e-2),
        asymmetry: Some(-0.25),
        flags: vec!["not_opaque".into(), "low_frequency_unreliable".into()],
    }
}

fn emit(rows: &[ScanRow]) -> String {
    let mut buf = Vec::new();
    write_csv(rows, &mut buf).unwrap();
    String::from_utf8(buf).unwrap()
}

#[test]
fn g_format_keeps_twelve_significant_digits() {
    assert_eq!(format_g(0.0), "0");
    assert_eq!(format_g(2.0), "2");
    assert_eq!(format_g(-0.25), "-0.25");
    assert_eq!(format_g(1.0 / 3.0), "0.333333333333");
    assert_eq!(format_g(std::f64::consts::PI * 1000.0), "3141.59265359");
    assert_eq!(format_g(1.5e-7), "1.5e-07");
    assert_eq!(format_g(2.5e13), "2.5e+13");
    assert_eq!(format_g(123_456_789_012.0), "123456789012");
    assert_eq!(format_g(0.000_012_5), "1.25e-05");
    assert_eq!(format_g(0.000_125), "0.000125");
    // rounding carries into the next decade
    assert_eq!(format_g(9.999_999_999_999_9), "10");
}

#[test]
fn header_is_fixed() {
    let text = emit(&[row(1.0)]);
    assert_eq!(text.lines().next().unwrap(), CSV_HEADER.join(","));
    assert_eq!(text.lines().next().unwrap(), "axis,tau_vis,tau_wkb,tau_nelson,tau_nelson_stderr,I_vis,T_bar,asymmetry,flags");
}

#[test]
fn one_row_gives_a_two_line_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("one.csv");
    emit_csv(&[row(2.0)], &path).unwrap();
    let text = std::fs::read_to_string(&path).unwrap();
    assert_eq!(text.lines().count(), 2);
    assert!(text.ends_with('\n'));
    assert!(emit_csv(&[], &path).is_err());
}

#[test]
fn round_trip_within_twelve_digit_quantisation() {
    let rows: Vec<ScanRow> = [0.5, 1.0, 2.75, 4.0].map(row).to_vec();
    let back = parse_csv(&emit(&rows)).unwrap();
    assert_eq!(back.len(), rows.len());
    let close = |a: Option<f64>, b: Option<f64>| match (a, b) {
        (Some(a), Some(b)) => (a - b).abs() <= 5e-12 * a.abs().max(b.abs()),
        (None, None) => true,
        _ => false,
    };
    for (a, b) in rows.iter().zip(&back) {
        assert!(close(Some(a.axis_value), Some(b.axis_value)));
        assert!(close(a.tau_vis, b.tau_vis));
        assert!(close(a.tau_wkb, b.tau_wkb));
        assert!(close(a.tau_nelson, b.tau_nelson));
        assert!(close(a.tau_nelson_stderr, b.tau_nelson_stderr));
        assert!(close(a.i_vis, b.i_vis));
        assert!(close(a.t_bar, b.t_bar));
        assert!(close(a.asymmetry, b.asymmetry));
        assert_eq!(a.flags, b.flags);
    }
    // a second pass is exact
    assert_eq!(parse_csv(&emit(&back)).unwrap(), back);
}

#[test]
fn values_with_twelve_digits_round_trip_to_1e_12() {
    let mut r = row(1.25);
    r.tau_vis = Some(1.234_567_890_12);
    r.tau_nelson = Some(0.000_123_456_789_012);
    let back = &parse_csv(&emit(&[r.clone()])).unwrap()[0];
    assert!((back.tau_vis.unwrap() - r.tau_vis.unwrap()).abs() <= 1e-12);
    assert!((back.tau_nelson.unwrap() - r.tau_nelson.unwrap()).abs() <= 1e-12);
}

#[test]
fn absent_values_are_empty_fields() {
    let mut r = ScanRow::empty(1.5);
    r.tau_wkb = Some(1.5);
    let text = emit(&[r.clone()]);
    let line = text.lines().nth(1).unwrap();
    assert_eq!(line, "1.5,,1.5,,,,,,");
    assert!(!text.contains("NaN"));
    assert_eq!(parse_csv(&text).unwrap(), vec![r]);
}

#[test]
fn flags_with_separators_stay_in_one_field() {
    let mut r = ScanRow::empty(1.0);
    r.flags = vec!["a".into(), "b".into()];
    let text = emit(&[r]);
    assert!(text.lines().nth(1).unwrap().ends_with(",a;b"));
}

#[test]
fn plot_script_draws_the_available_series() {
    let rows = vec![row(1.0), row(2.0)];
    let s = plot_script(&rows, "fig6.csv", "d");
    assert!(s.contains("set datafile separator ','"));
    assert!(s.contains("data = 'fig6.csv'"));
    assert!(s.contains("set output 'fig6.svg'"));
    assert!(s.contains("using 1:2 "));
    assert!(s.contains("using 1:3 "));
    assert!(s.contains("using 1:4:5 with yerrorbars"));
    assert_eq!(s.matches("title 'tau_").count(), 3);
}

#[test]
fn plot_script_omits_missing_nelson() {
    let mut rows = vec![row(1.0), row(2.0)];
    for r in &mut rows {
        r.tau_nelson = None;
        r.tau_nelson_stderr = None;
    }
    let s = plot_script(&rows, "scan.csv", "d");
    assert!(!s.contains("yerrorbars"));
    assert!(!s.contains("tau_Nelson"));
    assert_eq!(s.matches("title 'tau_").count(), 2);
}

#[test]
fn plot_script_runs_under_gnuplot_when_installed() {
    let available = Command::new("gnuplot").arg("--version").output().is_ok_and(|o| o.status.success());
    if !available {
        eprintln!("gnuplot not installed; skipping");
        return;
    }
    let dir = tempfile::tempdir().unwrap();
    let rows = vec![row(1.0), row(2.0), ScanRow::empty(3.0)];
    emit_csv(&rows, &dir.path().join("s.csv")).unwrap();
    emit_plot_script(&rows, &dir.path().join("s.gp"), "s.csv", "d").unwrap();
    let status = Command::new("gnuplot").arg("s.gp").current_dir(dir.path()).status().unwrap();
    assert!(status.success());
    assert!(dir.path().join("s.svg").exists());
}
