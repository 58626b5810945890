//! Plain-text fit summary in the familiar regression-table layout.

use std::fmt::Write;

use crate::estimation::FitResult;
use crate::history::Timing;

fn stars(p: f64) -> &'static str {
    match p {
        p if p < 0.001 => "***",
        p if p < 0.01 => "**",
        p if p < 0.05 => "*",
        p if p < 0.1 => ".",
        _ => " ",
    }
}

fn fmt_p(p: f64) -> String {
    if p.is_nan() {
        "NA".into()
    } else if p < 2.2e-16 {
        "< 2.2e-16".into()
    } else if p < 1e-4 {
        format!("{p:.3e}")
    } else {
        format!("{p:.6}")
    }
}

fn fmt_num(v: f64, decimals: usize) -> String {
    if v.is_nan() {
        "NA".into()
    } else {
        format!("{v:.decimals$}")
    }
}

pub fn format_summary(fit: &FitResult) -> String {
    let mut out = String::new();
    let title = match fit.mode {
        Timing::Ordinal => "Ordinal Likelihood",
        Timing::Exact => "Temporal Likelihood",
    };
    let _ = writeln!(out, "Relational Event Model ({title})\n");

    let rows: Vec<[String; 6]> = fit
        .parameter_names
        .iter()
        .enumerate()
        .map(|(i, name)| {
            [
                name.clone(),
                fmt_num(fit.coefficients[i], 6),
                fmt_num(fit.standard_errors[i], 6),
                fmt_num(fit.z_values[i], 3),
                fmt_p(fit.p_values[i]),
                stars(fit.p_values[i]).to_string(),
            ]
        })
        .collect();
    let header = ["", "Estimate", "Std.Err", "Z value", "Pr(>|z|)", ""];
    let mut widths = header.map(str::len);
    for r in &rows {
        for (w, c) in widths.iter_mut().zip(r) {
            *w = (*w).max(c.len());
        }
    }
    let line = |cells: [&str; 6]| {
        let mut s = format!("{:<w$}", cells[0], w = widths[0]);
        for i in 1..5 {
            let _ = write!(s, " {:>w$}", cells[i], w = widths[i]);
        }
        let _ = write!(s, " {}", cells[5]);
        s.trim_end().to_string()
    };
    let _ = writeln!(out, "{}", line(header));
    for r in &rows {
        let _ = writeln!(out, "{}", line([&r[0], &r[1], &r[2], &r[3], &r[4], &r[5]]));
    }
    let _ = writeln!(out, "---");
    let _ = writeln!(out, "Signif. codes:  0 '***' 0.001 '**' 0.01 '*' 0.05 '.' 0.1 ' ' 1");
    let _ = writeln!(out, "Null deviance: {:.3} on {} degrees of freedom", fit.null_deviance, fit.null_df);
    let _ = writeln!(
        out,
        "Residual deviance: {:.3} on {} degrees of freedom",
        fit.residual_deviance, fit.residual_df
    );
    let _ = writeln!(
        out,
        "\tChi-square: {:.4} on {} degrees of freedom, asymptotic p-value {}",
        fit.chi_square,
        fit.chi_square_df,
        fmt_p(fit.chi_square_p)
    );
    let _ = writeln!(out, "AIC: {:.3} AICC: {:.3} BIC: {:.3}", fit.aic, fit.aicc, fit.bic);
    if !fit.convergence.converged {
        let _ = writeln!(out, "WARNING: optimizer did not converge ({})", fit.convergence.message);
    }
    for w in &fit.warnings {
        let _ = writeln!(out, "Warning: {w}");
    }
    out
}
