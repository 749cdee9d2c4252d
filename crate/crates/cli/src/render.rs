// Human-readable tables, rendered from the same ResultFile the machine
// format prints.

use std::fmt::Write;

use crate::report::{CohomologyReport, GroupReport, KPair, PageReport, ResultFile};
use crate::system::{to_matrix, InvariantForm};
use crate::CliError;

fn show(form: &InvariantForm) -> Result<String, CliError> {
    Ok(form.to_invariants()?.to_string())
}

fn grid(header: &[String], rows: &[Vec<String>]) -> String {
    let cols = header.len();
    let widths: Vec<usize> = (0..cols)
        .map(|c| {
            rows.iter()
                .map(|r| r[c].chars().count())
                .chain([header[c].chars().count()])
                .max()
                .unwrap_or(0)
        })
        .collect();
    let rule: String = widths
        .iter()
        .map(|w| format!("+{}", "-".repeat(w + 2)))
        .collect::<String>()
        + "+\n";
    let line = |cells: &[String]| -> String {
        cells
            .iter()
            .zip(&widths)
            .map(|(c, w)| format!("| {c}{} ", " ".repeat(w - c.chars().count())))
            .collect::<String>()
            + "|\n"
    };
    let mut out = rule.clone();
    out += &line(header);
    out += &rule;
    for r in rows {
        out += &line(r);
    }
    out += &rule;
    out
}

pub fn page(page: &PageReport, n: usize) -> Result<String, CliError> {
    let mut out = String::new();
    let title = if page.infinity {
        format!("E{} = E∞", page.page)
    } else {
        format!("E{}", page.page)
    };
    writeln!(out, "{title}").unwrap();
    let header: Vec<String> = std::iter::once("q\\p".to_string())
        .chain((0..=n).map(|p| p.to_string()))
        .collect();
    let mut rows = Vec::new();
    for q in [1u8, 0] {
        let mut row = vec![q.to_string()];
        for p in 0..=n {
            let cell = page
                .cells
                .iter()
                .find(|c| c.p == p && c.q == q)
                .ok_or_else(|| CliError::Internal(format!("cell ({p},{q}) missing")))?;
            row.push(cell.invariants()?.to_string());
        }
        rows.push(row);
    }
    out += &grid(&header, &rows);
    for d in &page.differentials {
        if !to_matrix(&d.matrix, "differential")?.is_zero() {
            writeln!(
                out,
                "d{} ({},{}) -> ({},{}) is nonzero",
                page.page, d.from[0], d.from[1], d.to[0], d.to[1]
            )
            .unwrap();
        }
    }
    Ok(out)
}

fn group_line(name: &str, g: &GroupReport) -> Result<String, CliError> {
    Ok(match g {
        GroupReport::Determined(form) => format!("{name} = {} (determined)", show(form)?),
        GroupReport::Ambiguous { rank, candidates } if candidates.is_empty() => {
            format!("{name} ambiguous: rank {rank}, torsion too large to enumerate")
        }
        GroupReport::Ambiguous { rank, candidates } => {
            let shown = candidates.iter().map(show).collect::<Result<Vec<_>, _>>()?;
            format!("{name} ambiguous: rank {rank}, one of {}", shown.join(" | "))
        }
    })
}

pub fn crossed(k: &KPair) -> Result<String, CliError> {
    Ok(format!("{}\n{}\n", group_line("K0", &k.k0)?, group_line("K1", &k.k1)?))
}

pub fn cohomology(c: &CohomologyReport, n: usize) -> Result<String, CliError> {
    let mut out = String::new();
    for (name, groups) in [("K0", &c.k0), ("K1", &c.k1)] {
        let shown = groups.iter().map(show).collect::<Result<Vec<_>, _>>()?;
        writeln!(out, "H*(Z^{n}; {name}) = {}", shown.join(", ")).unwrap();
    }
    Ok(out)
}

pub fn result(r: &ResultFile) -> Result<String, CliError> {
    let mut out = String::new();
    for p in &r.pages {
        out += &page(p, r.n)?;
        out.push('\n');
    }
    if let Some(c) = &r.cohomology {
        out += &cohomology(c, r.n)?;
    }
    if let Some(k) = &r.crossed {
        out += &crossed(k)?;
    }
    for w in &r.warnings {
        writeln!(out, "warning: {w}").unwrap();
    }
    Ok(out)
}
