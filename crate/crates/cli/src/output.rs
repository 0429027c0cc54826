//! Scan tables as CSV and a gnuplot script that overlays them.

use std::fs::File;
use std::io::Write;
use std::path::Path;

use anyhow::{bail, Context, Result};

use crate::scan::ScanRow;

pub const CSV_HEADER: [&str; 9] = [
    "axis",
    "tau_vis",
    "tau_wkb",
    "tau_nelson",
    "tau_nelson_stderr",
    "I_vis",
    "T_bar",
    "asymmetry",
    "flags",
];

const SIGNIFICANT: usize = 12;

/// `%.12g`: 12 significant digits, trailing zeros dropped, exponent form
/// for exponents below -4 or above 11.
pub fn format_g(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    if !v.is_finite() {
        return format!("{v}");
    }
    let sci = format!("{:.*e}", SIGNIFICANT - 1, v);
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -4 || exp >= SIGNIFICANT as i32 {
        let m = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        return format!("{m}e{sign}{:02}", exp.abs());
    }
    let decimals = (SIGNIFICANT as i32 - 1 - exp).max(0) as usize;
    trim_zeros(&format!("{v:.decimals$}")).to_string()
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn cell(v: Option<f64>) -> String {
    v.map(format_g).unwrap_or_default()
}

pub fn write_csv<W: Write>(rows: &[ScanRow], out: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
    w.write_record(CSV_HEADER)?;
    for r in rows {
        w.write_record([
            format_g(r.axis_value),
            cell(r.tau_vis),
            cell(r.tau_wkb),
            cell(r.tau_nelson),
            cell(r.tau_nelson_stderr),
            cell(r.i_vis),
            cell(r.t_bar),
            cell(r.asymmetry),
            r.flags.join(";"),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn emit_csv(rows: &[ScanRow], path: &Path) -> Result<()> {
    if rows.is_empty() {
        bail!("no rows to write");
    }
    let file = File::create(path).with_context(|| format!("creating {}", path.display()))?;
    write_csv(rows, file).with_context(|| format!("writing {}", path.display()))
}

pub fn parse_csv(text: &str) -> Result<Vec<ScanRow>> {
    let mut r = csv::ReaderBuilder::new().has_headers(true).from_reader(text.as_bytes());
    let header: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
    if header != CSV_HEADER {
        bail!("unexpected header {header:?}");
    }
    let num = |s: &str| -> Result<Option<f64>> {
        if s.is_empty() {
            Ok(None)
        } else {
            Ok(Some(s.parse().with_context(|| format!("bad number '{s}'"))?))
        }
    };
    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        let f = |i: usize| rec.get(i).unwrap_or("");
        rows.push(ScanRow {
            axis_value: num(f(0))?.context("missing axis value")?,
            tau_vis: num(f(1))?,
            tau_wkb: num(f(2))?,
            tau_nelson: num(f(3))?,
            tau_nelson_stderr: num(f(4))?,
            i_vis: num(f(5))?,
            t_bar: num(f(6))?,
            asymmetry: num(f(7))?,
            flags: f(8).split(';').filter(|s| !s.is_empty()).map(str::to_string).collect(),
        });
    }
    Ok(rows)
}

/// Gnuplot script drawing every τ series that has at least one value, with
/// error bars on the Nelson series. Run it from the directory holding
/// `csv_name`.
pub fn plot_script(rows: &[ScanRow], csv_name: &str, x_label: &str) -> String {
    let stem = csv_name.strip_suffix(".csv").unwrap_or(csv_name);
    let mut series = Vec::new();
    if rows.iter().any(|r| r.tau_vis.is_some()) {
        series.push("data using 1:2 with linespoints pt 7 title 'tau_vis'".to_string());
    }
    if rows.iter().any(|r| r.tau_wkb.is_some()) {
        series.push("data using 1:3 with lines lw 2 title 'tau_WKB'".to_string());
    }
    if rows.iter().any(|r| r.tau_nelson.is_some()) {
        series.push("data using 1:4:5 with yerrorbars pt 5 title 'tau_Nelson'".to_string());
    }
    let mut s = String::new();
    s.push_str("# traversal time versus scan axis\n");
    s.push_str(&format!("data = '{csv_name}'\n"));
    s.push_str("set datafile separator ','\n");
    s.push_str("set datafile missing ''\n");
    s.push_str("set key autotitle columnhead top left\n");
    s.push_str("set terminal svg size 800,560 dynamic\n");
    s.push_str(&format!("set output '{stem}.svg'\n"));
    s.push_str(&format!("set xlabel '{x_label}'\n"));
    s.push_str("set ylabel 'tau'\n");
    s.push_str("set grid\n");
    if series.is_empty() {
        s.push_str("set title 'no traversal-time series'\n");
        s.push_str("plot data using 1:(NaN) notitle\n");
    } else {
        s.push_str(&format!("plot {}\n", series.join(", \\\n     ")));
    }
    s
}

pub fn emit_plot_script(rows: &[ScanRow], path: &Path, csv_name: &str, x_label: &str) -> Result<()> {
    if rows.is_empty() {
        bail!("no rows to plot");
    }
    std::fs::write(path, plot_script(rows, csv_name, x_label)).with_context(|| format!("writing {}", path.display()))
}
