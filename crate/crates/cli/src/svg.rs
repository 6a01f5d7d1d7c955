//! Hand-written SVG scatter plots of zeros over the translated domains.

use std::fmt::Write;

use eisenzero::moebius::{gamma_for_lambda, moebius_f64, BoundarySegment};
use eisenzero::zerofinder::FigureRow;
use eisenzero::{Complex64, ExtRational, UniModularMatrix};

const RE: (f64, f64) = (-1.6, 1.6);
const IM: (f64, f64) = (0.0, 2.2);
const WIDTH: f64 = 800.0;
const HEIGHT: f64 = WIDTH * (IM.1 - IM.0) / (RE.1 - RE.0);

fn x(re: f64) -> f64 {
    (re - RE.0) / (RE.1 - RE.0) * WIDTH
}

fn y(im: f64) -> f64 {
    (IM.1 - im) / (IM.1 - IM.0) * HEIGHT
}

fn inside(z: Complex64) -> bool {
    (RE.0 - 1.0..=RE.1 + 1.0).contains(&z.re) && (IM.0..=IM.1 + 1.0).contains(&z.im)
}

/// Polyline through the image under `γ` of the boundary of `F̄` truncated at
/// `top`, split where it leaves the view.
fn boundary_paths(gamma: &UniModularMatrix, top: f64) -> Vec<String> {
    let mut paths = Vec::new();
    for seg in [BoundarySegment::L, BoundarySegment::C, BoundarySegment::R] {
        let curve = seg.curve(top);
        let mut d = String::new();
        let mut pen = false;
        for i in 0..=400 {
            let z = moebius_f64(gamma, curve.point(i as f64 / 400.0));
            if z.is_finite() && inside(z) {
                let _ = write!(d, "{}{:.2},{:.2} ", if pen { "L" } else { "M" }, x(z.re), y(z.im));
                pen = true;
            } else {
                pen = false;
            }
        }
        if !d.is_empty() {
            paths.push(d.trim_end().to_string());
        }
    }
    paths
}

/// Self-contained SVG of `rows` over the translates `γ_λ F̄`; the unit circle
/// and its horizontal translates are drawn faintly for context.
pub fn render(rows: &[FigureRow], lambdas: &[ExtRational], title: &str) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {WIDTH:.0} {HEIGHT:.0}" width="{WIDTH:.0}" height="{HEIGHT:.0}">"#
    );
    let _ = writeln!(s, "<title>{}</title>", escape(title));
    let _ = writeln!(s, r##"<rect width="100%" height="100%" fill="#ffffff"/>"##);
    let _ = writeln!(s, r##"<g fill="none" stroke="#cccccc" stroke-width="0.8">"##);
    for n in -2..=2 {
        let c = n as f64;
        let _ = writeln!(
            s,
            r#"<path d="M{:.2},{:.2} A{:.2},{:.2} 0 0 1 {:.2},{:.2}"/>"#,
            x(c - 1.0),
            y(0.0),
            x(1.0) - x(0.0),
            y(0.0) - y(1.0),
            x(c + 1.0),
            y(0.0)
        );
        let _ = writeln!(s, r#"<line x1="{0:.2}" y1="{1:.2}" x2="{0:.2}" y2="{2:.2}"/>"#, x(c + 0.5), y(0.0), y(IM.1));
    }
    let _ = writeln!(s, "</g>");
    let _ = writeln!(s, r##"<g fill="none" stroke="#1f4e79" stroke-width="1.2">"##);
    for l in lambdas {
        for d in boundary_paths(&gamma_for_lambda(l), 60.0) {
            let _ = writeln!(s, r#"<path d="{d}"><title>λ = {l}</title></path>"#);
        }
    }
    let _ = writeln!(s, "</g>");
    let _ = writeln!(s, r#"<line x1="0" y1="{0:.2}" x2="{WIDTH:.0}" y2="{0:.2}" stroke="black" stroke-width="1"/>"#, y(0.0));
    let _ = writeln!(s, r##"<g fill="#c0392b">"##);
    for r in rows {
        let Some(z) = r.location() else { continue };
        if !inside(z) {
            continue;
        }
        let _ = writeln!(
            s,
            r#"<circle cx="{:.2}" cy="{:.2}" r="2.5"><title>{} {:.16e}{:+.16e}i</title></circle>"#,
            x(z.re),
            y(z.im),
            r.domain_tag(),
            z.re,
            z.im
        );
    }
    let _ = writeln!(s, "</g>");
    let cusps = rows.iter().filter(|r| r.zero.is_cusp).count();
    if cusps > 0 {
        let _ = writeln!(
            s,
            r#"<text x="8" y="18" font-family="sans-serif" font-size="13">zero at the cusp i∞ in {cusps} domain(s)</text>"#
        );
    }
    let _ = writeln!(s, "</svg>");
    s
}

fn escape(t: &str) -> String {
    t.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn view_box_corners() {
        assert_eq!(x(-1.6), 0.0);
        assert!((x(1.6) - WIDTH).abs() < 1e-9);
        assert_eq!(y(2.2), 0.0);
        assert!((y(0.0) - HEIGHT).abs() < 1e-9);
    }

    #[test]
    fn empty_plot_is_well_formed() {
        let s = render(&[], &[ExtRational::Infinity], "E_23");
        assert!(s.starts_with("<svg") && s.trim_end().ends_with("</svg>"));
        assert!(s.contains(r#"viewBox="0 0 800 550""#));
        assert!(!s.contains("<circle"));
    }

    #[test]
    fn translate_boundaries_are_drawn() {
        let s = render(&[], &[ExtRational::from_ratio(1, 2)], "x");
        assert!(s.matches("<path d=\"M").count() >= 5 + 1);
    }
}
