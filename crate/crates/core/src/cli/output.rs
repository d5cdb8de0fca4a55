//! Table rendering for the command-line tool.

use super::config::OutputFormat;

/// Six significant digits, fixed notation for moderate magnitudes.
pub fn sig6(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{x:.5e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent marker");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..6).contains(&exp) {
        trim_zeros(format!("{x:.*}", (5 - exp).max(0) as usize))
    } else {
        format!("{}e{exp}", trim_zeros(mantissa.to_string()))
    }
}

fn trim_zeros(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

/// A titled block of rows sharing one header.
#[derive(Debug, Clone, Default)]
pub struct Block {
    pub title: Option<String>,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Block {
    pub fn new(title: Option<String>, header: &[&str]) -> Self {
        Self { title, header: header.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }
}

/// Renders a provenance line followed by each block. Lines end in LF.
pub fn render(provenance: &str, blocks: &[Block], format: OutputFormat) -> String {
    let mut out = format!("# {provenance}\n");
    for b in blocks {
        match format {
            OutputFormat::Csv => {
                if let Some(t) = &b.title {
                    out.push_str(&format!("# {t}\n"));
                }
                out.push_str(&b.header.join(","));
                out.push('\n');
                for r in &b.rows {
                    out.push_str(&r.join(","));
                    out.push('\n');
                }
            }
            OutputFormat::Markdown => {
                out.push('\n');
                if let Some(t) = &b.title {
                    out.push_str(&format!("**{t}**\n\n"));
                }
                out.push_str(&format!("| {} |\n", b.header.join(" | ")));
                out.push_str(&format!("|{}\n", "---:|".repeat(b.header.len())));
                for r in &b.rows {
                    out.push_str(&format!("| {} |\n", r.join(" | ")));
                }
            }
        }
    }
    out
}
