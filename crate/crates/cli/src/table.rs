use std::fmt::Write as _;

use serde_json::{json, Map, Value};

/// How a column is printed in CSV.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Style {
    /// Six significant digits.
    Sig6,
    /// Three decimals, the rounding used for fidelity tables.
    Fixed3,
    /// Integer column.
    Int,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PanelKind {
    Bars,
    Line,
}

/// One chart in the SVG rendering of a table.
#[derive(Debug, Clone, PartialEq)]
pub struct Panel {
    pub kind: PanelKind,
    pub x: &'static str,
    pub y: &'static str,
    /// Horizontal guide drawn across the panel.
    pub reference: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub command: &'static str,
    pub preset: String,
    pub parameters: Vec<(&'static str, Value)>,
    pub columns: Vec<(&'static str, Style)>,
    pub rows: Vec<Vec<Option<f64>>>,
    pub panels: Vec<Panel>,
}

pub fn sig6(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let sci = format!("{x:.5e}");
    // exponent after rounding to six digits
    let mag: i32 = sci.rsplit('e').next().and_then(|e| e.parse().ok()).unwrap_or(0);
    if (-4..6).contains(&mag) {
        let decimals = (5 - mag) as usize;
        format!("{x:.decimals$}")
    } else {
        sci
    }
}

fn cell(v: Option<f64>, style: Style) -> String {
    match v {
        None => String::new(),
        Some(x) => match style {
            Style::Sig6 => sig6(x),
            Style::Fixed3 => format!("{x:.3}"),
            Style::Int => format!("{}", x as i64),
        },
    }
}

impl Table {
    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|(c, _)| *c == name)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        let header: Vec<&str> = self.columns.iter().map(|(c, _)| *c).collect();
        out.push_str(&header.join(","));
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().zip(&self.columns).map(|(v, (_, st))| cell(*v, *st)).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    /// Non-finite values become `null`.
    pub fn to_json(&self) -> Value {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                let mut obj = Map::new();
                for (v, (c, _)) in row.iter().zip(&self.columns) {
                    let val = match v {
                        Some(x) if x.is_finite() => json!(x),
                        _ => Value::Null,
                    };
                    obj.insert((*c).to_string(), val);
                }
                Value::Object(obj)
            })
            .collect();
        let params: Map<String, Value> = self.parameters.iter().map(|(k, v)| ((*k).to_string(), v.clone())).collect();
        json!({
            "command": self.command,
            "preset": self.preset,
            "parameters": params,
            "columns": self.columns.iter().map(|(c, _)| *c).collect::<Vec<_>>(),
            "rows": rows,
        })
    }

    pub fn to_svg(&self) -> String {
        const W: f64 = 640.0;
        const H: f64 = 320.0;
        let height = H * self.panels.len().max(1) as f64;
        let mut out = String::new();
        let _ = writeln!(
            out,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{height}" viewBox="0 0 {W} {height}" font-family="sans-serif" font-size="11">"#
        );
        for (i, panel) in self.panels.iter().enumerate() {
            self.panel_svg(&mut out, panel, H * i as f64, W, H);
        }
        out.push_str("</svg>\n");
        out
    }

    fn panel_svg(&self, out: &mut String, panel: &Panel, top: f64, w: f64, h: f64) {
        let (Some(xi), Some(yi)) = (self.column(panel.x), self.column(panel.y)) else {
            return;
        };
        let pts: Vec<(f64, f64)> = self
            .rows
            .iter()
            .filter_map(|r| match (r[xi], r[yi]) {
                (Some(x), Some(y)) if x.is_finite() && y.is_finite() => Some((x, y)),
                _ => None,
            })
            .collect();
        let (l, r, t, b) = (56.0, w - 16.0, top + 24.0, top + h - 36.0);
        let _ = writeln!(out, r#"<text x="{}" y="{}" text-anchor="middle">{} vs {}</text>"#, w / 2.0, top + 14.0, panel.y, panel.x);
        let _ = writeln!(out, r#"<path d="M{l} {t} V{b} H{r}" fill="none" stroke="black"/>"#);
        if pts.is_empty() {
            return;
        }
        let (mut x0, mut x1) = pts.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, c), p| (a.min(p.0), c.max(p.0)));
        let mut y0 = pts.iter().map(|p| p.1).fold(f64::INFINITY, f64::min).min(0.0);
        let mut y1 = pts.iter().map(|p| p.1).fold(f64::NEG_INFINITY, f64::max);
        if let Some(g) = panel.reference {
            y0 = y0.min(g);
            y1 = y1.max(g);
        }
        if panel.kind == PanelKind::Bars {
            x0 -= 0.5;
            x1 += 0.5;
        }
        if x1 <= x0 {
            x1 = x0 + 1.0;
        }
        if y1 <= y0 {
            y1 = y0 + 1.0;
        }
        let sx = |x: f64| l + (x - x0) / (x1 - x0) * (r - l);
        let sy = |y: f64| b - (y - y0) / (y1 - y0) * (b - t);
        for (v, y) in [(y0, b), (y1, t)] {
            let _ = writeln!(out, r#"<text x="{}" y="{}" text-anchor="end">{}</text>"#, l - 4.0, y + 4.0, sig6(v));
        }
        for (v, anchor) in [(x0, "start"), (x1, "end")] {
            let _ = writeln!(out, r#"<text x="{}" y="{}" text-anchor="{anchor}">{}</text>"#, sx(v), b + 14.0, sig6(v));
        }
        match panel.kind {
            PanelKind::Bars => {
                let bw = ((r - l) / (x1 - x0) * 0.8).max(1.0);
                for &(x, y) in &pts {
                    let (ya, yb) = (sy(y.max(y0)), sy(y0.max(0.0)));
                    let _ = writeln!(
                        out,
                        r##"<rect x="{:.2}" y="{:.2}" width="{bw:.2}" height="{:.2}" fill="#4a7ab5"/>"##,
                        sx(x) - bw / 2.0,
                        ya.min(yb),
                        (yb - ya).abs()
                    );
                }
            }
            PanelKind::Line => {
                let d: Vec<String> = pts.iter().map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y))).collect();
                let _ = writeln!(out, r##"<polyline points="{}" fill="none" stroke="#4a7ab5"/>"##, d.join(" "));
            }
        }
        if let Some(g) = panel.reference {
            let _ = writeln!(
                out,
                r##"<line x1="{l}" y1="{y:.2}" x2="{r}" y2="{y:.2}" stroke="#c03030" stroke-dasharray="4 3"/>"##,
                y = sy(g)
            );
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn six_significant_digits() {
        assert_eq!(sig6(1.0), "1.00000");
        assert_eq!(sig6(504.0445), "504.045");
        assert_eq!(sig6(0.134994), "0.134994");
        assert_eq!(sig6(1.3499e-4), "0.000134990");
        assert_eq!(sig6(1.3499e-5), "1.34990e-5");
        assert_eq!(sig6(5.0e11), "5.00000e11");
        assert_eq!(sig6(-2.5), "-2.50000");
        assert_eq!(sig6(9.9999996), "10.0000");
        assert_eq!(sig6(0.0), "0");
        assert_eq!(sig6(f64::NEG_INFINITY), "-inf");
    }

    #[test]
    fn csv_layout() {
        let t = Table {
            command: "sweep",
            preset: "line".into(),
            parameters: vec![],
            columns: vec![("N", Style::Int), ("F", Style::Fixed3), ("t0", Style::Sig6)],
            rows: vec![vec![Some(4.0), Some(0.99996), None]],
            panels: vec![],
        };
        assert_eq!(t.to_csv(), "N,F,t0\n4,1.000,\n");
        assert_eq!(t.to_json()["rows"][0]["t0"], Value::Null);
    }
}
