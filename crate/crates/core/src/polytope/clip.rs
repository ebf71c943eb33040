/// A convex polygon whose edges carry labels. Edge `k` runs from vertex `k`
/// to vertex `k + 1` and is tagged `labels[k]`.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledPolygon<L> {
    pub vertices: Vec<[f64; 2]>,
    pub labels: Vec<L>,
}

impl<L: Copy + Default> LabeledPolygon<L> {
    pub fn unlabeled(vertices: Vec<[f64; 2]>) -> Self {
        let labels = vec![L::default(); vertices.len()];
        Self { vertices, labels }
    }
}

impl<L: Copy> LabeledPolygon<L> {
    pub fn uniform(vertices: Vec<[f64; 2]>, label: L) -> Self {
        let labels = vec![label; vertices.len()];
        Self { vertices, labels }
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.len() < 3
    }

    /// Edges as `(start, end, label)`.
    pub fn edges(&self) -> impl Iterator<Item = ([f64; 2], [f64; 2], L)> + '_ {
        let n = self.vertices.len();
        (0..n).map(move |k| (self.vertices[k], self.vertices[(k + 1) % n], self.labels[k]))
    }
}

/// Sutherland-Hodgman clip against `{<normal, p> <= offset}`. New edges on the
/// cut line get `cut_label`. Points within `1e-12` (relative) of the line count
/// as inside; coincident consecutive vertices are merged.
pub fn clip_labeled<L: Copy>(
    poly: &LabeledPolygon<L>,
    normal: [f64; 2],
    offset: f64,
    cut_label: L,
) -> LabeledPolygon<L> {
    let n = poly.vertices.len();
    let scale = poly
        .vertices
        .iter()
        .fold(offset.abs(), |m, p| m.max(p[0].abs()).max(p[1].abs()))
        .max(1.0);
    let nlen = normal[0].hypot(normal[1]).max(1e-300);
    let tol = 1e-12 * scale * nlen;
    let side = |p: [f64; 2]| normal[0] * p[0] + normal[1] * p[1] - offset;
    let mut verts: Vec<[f64; 2]> = Vec::with_capacity(n + 1);
    let mut labels: Vec<L> = Vec::with_capacity(n + 1);
    for k in 0..n {
        let a = poly.vertices[k];
        let b = poly.vertices[(k + 1) % n];
        let (da, db) = (side(a), side(b));
        let (ain, bin) = (da <= tol, db <= tol);
        let cross = |da: f64, db: f64| {
            let t = da / (da - db);
            [a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])]
        };
        match (ain, bin) {
            (true, true) => {
                verts.push(a);
                labels.push(poly.labels[k]);
            }
            (true, false) => {
                verts.push(a);
                labels.push(poly.labels[k]);
                if da < -tol {
                    verts.push(cross(da, db));
                    labels.push(cut_label);
                } else {
                    // a is on the line: the cut edge starts at a
                    *labels.last_mut().unwrap() = cut_label;
                }
            }
            (false, true) => {
                if db < -tol {
                    verts.push(cross(da, db));
                    labels.push(poly.labels[k]);
                }
            }
            (false, false) => {}
        }
    }
    // merge coincident consecutive vertices, keeping the later label
    let ptol = 1e-12 * scale;
    let mut i = 0;
    while verts.len() > 1 && i < verts.len() {
        let j = (i + 1) % verts.len();
        let (p, q) = (verts[i], verts[j]);
        if (p[0] - q[0]).abs() <= ptol && (p[1] - q[1]).abs() <= ptol {
            verts.remove(i);
            labels.remove(i);
        } else {
            i += 1;
        }
    }
    let extent = verts.iter().skip(1).fold(0.0f64, |m, p| {
        m.max((p[0] - verts[0][0]).abs()).max((p[1] - verts[0][1]).abs())
    });
    if verts.len() < 3 || crate::convex::polygon_area(&verts) <= 1e-14 * extent * extent {
        return LabeledPolygon {
            vertices: Vec::new(),
            labels: Vec::new(),
        };
    }
    LabeledPolygon {
        vertices: verts,
        labels,
    }
}
