//! Deterministic SVG rendering of a partitioned permutation on up to three
//! circles: permutation arcs solid, partition joins dashed.

use trifree::{GammaShape, PartitionedPermutation};

struct Point {
    x: f64,
    y: f64,
}

fn node_positions(shape: &GammaShape) -> (Vec<Point>, Vec<Point>, f64, f64) {
    let r = shape.circles();
    let max_size = shape.sizes().iter().copied().max().unwrap_or(1) as f64;
    let base_radius = 40.0 + 14.0 * max_size;
    let gap = 2.6 * base_radius;
    let width = gap * r as f64 + base_radius;
    let height = 2.0 * base_radius + 120.0;
    let mut nodes = Vec::new();
    let mut centers = Vec::new();
    for i in 0..r {
        let center = Point { x: gap * (i as f64 + 0.5), y: height / 2.0 };
        let m = shape.sizes()[i] as f64;
        let radius = base_radius * (0.55 + 0.45 * (shape.sizes()[i] as f64 / max_size));
        let (start, _) = shape.circle_span(i);
        let _ = start;
        for k in 0..shape.sizes()[i] {
            let angle = -std::f64::consts::FRAC_PI_2 + 2.0 * std::f64::consts::PI * k as f64 / m;
            nodes.push(Point {
                x: center.x + radius * angle.cos(),
                y: center.y + radius * angle.sin(),
            });
        }
        centers.push(center);
    }
    (nodes, centers, width, height)
}

/// Renders the diagram; same input always produces byte-identical output.
pub fn render(pp: &PartitionedPermutation, shape: &GammaShape) -> String {
    let (nodes, centers, width, height) = node_positions(shape);
    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{:.1}\" height=\"{:.1}\" \
         viewBox=\"0 0 {:.1} {:.1}\">\n",
        width, height, width, height
    ));
    svg.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");
    // circle outlines
    for (i, center) in centers.iter().enumerate() {
        let m = shape.sizes()[i] as f64;
        let max_size = shape.sizes().iter().copied().max().unwrap_or(1) as f64;
        let base_radius = 40.0 + 14.0 * max_size;
        let radius = base_radius * (0.55 + 0.45 * (m / max_size));
        svg.push_str(&format!(
            "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"{:.2}\" fill=\"none\" \
             stroke=\"#cccccc\" stroke-width=\"1\"/>\n",
            center.x, center.y, radius
        ));
    }
    let pos = |label: u32| &nodes[label as usize - 1];
    // partition joins: dashed chains through the least elements of the
    // cycles inside each multi-cycle block
    for block in pp.marked_blocks() {
        let mut mins: Vec<u32> = block.iter().map(|cycle| cycle[0]).collect();
        mins.sort_unstable();
        for pair in mins.windows(2) {
            let (a, b) = (pos(pair[0]), pos(pair[1]));
            svg.push_str(&format!(
                "<line x1=\"{:.2}\" y1=\"{:.2}\" x2=\"{:.2}\" y2=\"{:.2}\" \
                 stroke=\"#cc3333\" stroke-width=\"1.2\" stroke-dasharray=\"5,4\"/>\n",
                a.x, a.y, b.x, b.y
            ));
        }
    }
    // permutation arcs
    for cycle in pp.perm().cycles() {
        if cycle.len() == 1 {
            let p = pos(cycle[0]);
            svg.push_str(&format!(
                "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"7.00\" fill=\"none\" \
                 stroke=\"#333333\" stroke-width=\"1.2\"/>\n",
                p.x, p.y - 10.0
            ));
            continue;
        }
        for w in 0..cycle.len() {
            let from = pos(cycle[w]);
            let to = pos(cycle[(w + 1) % cycle.len()]);
            let mx = (from.x + to.x) / 2.0;
            let my = (from.y + to.y) / 2.0 - 14.0;
            svg.push_str(&format!(
                "<path d=\"M {:.2} {:.2} Q {:.2} {:.2} {:.2} {:.2}\" fill=\"none\" \
                 stroke=\"#333333\" stroke-width=\"1.4\" marker-end=\"url(#arrow)\"/>\n",
                from.x, from.y, mx, my, to.x, to.y
            ));
        }
    }
    svg.push_str(
        "<defs><marker id=\"arrow\" viewBox=\"0 0 10 10\" refX=\"9\" refY=\"5\" \
         markerWidth=\"5\" markerHeight=\"5\" orient=\"auto-start-reverse\">\
         <path d=\"M 0 0 L 10 5 L 0 10 z\" fill=\"#333333\"/></marker></defs>\n",
    );
    // node labels on top
    for (i, node) in nodes.iter().enumerate() {
        svg.push_str(&format!(
            "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"9.50\" fill=\"white\" \
             stroke=\"#555555\" stroke-width=\"1\"/>\n",
            node.x, node.y
        ));
        svg.push_str(&format!(
            "<text x=\"{:.2}\" y=\"{:.2}\" font-size=\"9\" text-anchor=\"middle\" \
             dominant-baseline=\"central\" font-family=\"monospace\">{}</text>\n",
            node.x,
            node.y,
            i + 1
        ));
    }
    svg.push_str(&format!(
        "<text x=\"10\" y=\"{:.2}\" font-size=\"10\" font-family=\"monospace\">pi = {} ; V = {}</text>\n",
        height - 10.0,
        pp.perm(),
        pp.part()
    ));
    svg.push_str("</svg>\n");
    svg
}
