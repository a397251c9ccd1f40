//! Minimal static SVG output: one polyline with axes, byte-deterministic
//! for identical input.

use std::fmt::Write as _;

#[derive(Debug, PartialEq)]
pub enum SvgError {
    EmptySeries,
}

impl std::fmt::Display for SvgError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SvgError::EmptySeries => write!(f, "cannot plot an empty series"),
        }
    }
}

impl std::error::Error for SvgError {}

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 480.0;
const MARGIN: f64 = 50.0;

/// Renders `(x, y)` pairs as an axis-annotated polyline.
pub fn render_curve(series: &[(f64, f64)], title: &str) -> Result<String, SvgError> {
    if series.is_empty() {
        return Err(SvgError::EmptySeries);
    }
    let (mut x_lo, mut x_hi) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut y_lo, mut y_hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for &(x, y) in series {
        x_lo = x_lo.min(x);
        x_hi = x_hi.max(x);
        y_lo = y_lo.min(y);
        y_hi = y_hi.max(y);
    }
    if x_hi == x_lo {
        x_hi = x_lo + 1.0;
    }
    if y_hi == y_lo {
        y_hi = y_lo + 1.0;
    }
    let sx = (WIDTH - 2.0 * MARGIN) / (x_hi - x_lo);
    let sy = (HEIGHT - 2.0 * MARGIN) / (y_hi - y_lo);
    let map = |x: f64, y: f64| -> (f64, f64) {
        (MARGIN + (x - x_lo) * sx, HEIGHT - MARGIN - (y - y_lo) * sy)
    };

    let mut out = String::new();
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" viewBox=\"0 0 {WIDTH} {HEIGHT}\">"
    );
    let _ = writeln!(out, "<title>{title}</title>");
    let _ = writeln!(
        out,
        "<rect x=\"0\" y=\"0\" width=\"{WIDTH}\" height=\"{HEIGHT}\" fill=\"white\"/>"
    );
    // axes along the left and bottom margins
    let _ = writeln!(
        out,
        "<line x1=\"{m}\" y1=\"{m}\" x2=\"{m}\" y2=\"{b}\" stroke=\"black\"/>",
        m = MARGIN,
        b = HEIGHT - MARGIN
    );
    let _ = writeln!(
        out,
        "<line x1=\"{m}\" y1=\"{b}\" x2=\"{r}\" y2=\"{b}\" stroke=\"black\"/>",
        m = MARGIN,
        b = HEIGHT - MARGIN,
        r = WIDTH - MARGIN
    );
    let _ = writeln!(
        out,
        "<text x=\"{m}\" y=\"{y}\" font-size=\"12\">{x_lo:.6} .. {x_hi:.6}</text>",
        m = MARGIN,
        y = HEIGHT - MARGIN / 2.0
    );
    let _ = writeln!(
        out,
        "<text x=\"4\" y=\"{m}\" font-size=\"12\">{y_lo:.6} .. {y_hi:.6}</text>",
        m = MARGIN
    );
    let mut points = String::new();
    for &(x, y) in series {
        let (px, py) = map(x, y);
        let _ = write!(points, "{px:.3},{py:.3} ");
    }
    let _ = writeln!(
        out,
        "<polyline fill=\"none\" stroke=\"steelblue\" stroke-width=\"1.5\" points=\"{}\"/>",
        points.trim_end()
    );
    let _ = writeln!(out, "</svg>");
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_point_series_has_one_polyline() {
        let svg = render_curve(&[(0.0, 0.0), (1.0, 2.0)], "demo").unwrap();
        assert_eq!(svg.matches("<polyline").count(), 1);
        assert!(svg.contains("<svg"));
        assert!(svg.contains("</svg>"));
    }

    #[test]
    fn empty_series_is_an_error() {
        assert_eq!(
            render_curve(&[], "demo").unwrap_err(),
            SvgError::EmptySeries
        );
    }

    #[test]
    fn identical_input_gives_identical_bytes() {
        let series = [(0.0, 1.0), (0.5, -0.25), (1.0, 0.75)];
        let a = render_curve(&series, "same").unwrap();
        let b = render_curve(&series, "same").unwrap();
        assert_eq!(a, b);
    }
}
