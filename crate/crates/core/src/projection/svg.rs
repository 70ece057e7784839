//! Self-contained SVG scatter plot of a 2-D projection: positive examples
//! green, negative examples red.

use super::tsne::ProjectedPoint;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 480.0;
const MARGIN: f64 = 24.0;
const POSITIVE_COLOR: &str = "#2e8b57";
const NEGATIVE_COLOR: &str = "#c0392b";

/// Render points with their polarity (`true` = positive).
pub fn scatter_svg(points: &[(&ProjectedPoint, bool)]) -> String {
    let (mut min_x, mut max_x) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut min_y, mut max_y) = (f64::INFINITY, f64::NEG_INFINITY);
    for (p, _) in points {
        min_x = min_x.min(p.x);
        max_x = max_x.max(p.x);
        min_y = min_y.min(p.y);
        max_y = max_y.max(p.y);
    }
    let span_x = (max_x - min_x).max(1e-9);
    let span_y = (max_y - min_y).max(1e-9);

    let mut out = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" \
         viewBox=\"0 0 {WIDTH} {HEIGHT}\">\n\
         <rect width=\"{WIDTH}\" height=\"{HEIGHT}\" fill=\"white\"/>\n"
    );
    for (p, positive) in points {
        let cx = MARGIN + (p.x - min_x) / span_x * (WIDTH - 2.0 * MARGIN);
        let cy = HEIGHT - MARGIN - (p.y - min_y) / span_y * (HEIGHT - 2.0 * MARGIN);
        let color = if *positive {
            POSITIVE_COLOR
        } else {
            NEGATIVE_COLOR
        };
        out.push_str(&format!(
            "<circle cx=\"{cx:.2}\" cy=\"{cy:.2}\" r=\"3\" fill=\"{color}\" fill-opacity=\"0.7\"/>\n"
        ));
    }
    out.push_str("</svg>\n");
    out
}
