//! Contour extraction for the rate-slope level set in the feature plane:
//! marching squares over a uniform grid, with segment stitching into
//! polylines.

/// One traced contour polyline (closed when first == last vertex).
pub struct Polyline {
    pub points: Vec<(f64, f64)>,
}

/// March the level set `f(x, y) = level` over `[x0, x1] x [y0, y1]` with an
/// `n x n` cell grid. Returns stitched polylines.
pub fn march<F: Fn(f64, f64) -> f64>(
    f: F,
    bounds: (f64, f64, f64, f64),
    n: usize,
    level: f64,
) -> Vec<Polyline> {
    let (x0, x1, y0, y1) = bounds;
    let dx = (x1 - x0) / n as f64;
    let dy = (y1 - y0) / n as f64;

    // Field samples on the (n+1)^2 lattice.
    let mut field = vec![0.0f64; (n + 1) * (n + 1)];
    for j in 0..=n {
        for i in 0..=n {
            field[j * (n + 1) + i] = f(x0 + i as f64 * dx, y0 + j as f64 * dy) - level;
        }
    }
    let at = |i: usize, j: usize| field[j * (n + 1) + i];

    // Interpolated crossing on the edge between two lattice points.
    let cross = |xa: f64, ya: f64, va: f64, xb: f64, yb: f64, vb: f64| -> (f64, f64) {
        let t = if (vb - va).abs() < 1e-300 {
            0.5
        } else {
            (-va / (vb - va)).clamp(0.0, 1.0)
        };
        (xa + t * (xb - xa), ya + t * (yb - ya))
    };

    let mut segments: Vec<((f64, f64), (f64, f64))> = Vec::new();
    for j in 0..n {
        for i in 0..n {
            let (xa, ya) = (x0 + i as f64 * dx, y0 + j as f64 * dy);
            let (xb, yb) = (xa + dx, ya + dy);
            let v = [at(i, j), at(i + 1, j), at(i + 1, j + 1), at(i, j + 1)];
            let mut idx = 0usize;
            for (bit, vk) in v.iter().enumerate() {
                if *vk > 0.0 {
                    idx |= 1 << bit;
                }
            }
            if idx == 0 || idx == 15 {
                continue;
            }
            // Edge crossings: 0 bottom, 1 right, 2 top, 3 left.
            let edge = |e: usize| -> (f64, f64) {
                match e {
                    0 => cross(xa, ya, v[0], xb, ya, v[1]),
                    1 => cross(xb, ya, v[1], xb, yb, v[2]),
                    2 => cross(xb, yb, v[2], xa, yb, v[3]),
                    _ => cross(xa, yb, v[3], xa, ya, v[0]),
                }
            };
            // Marching-squares case table (pairs of crossed edges).
            let pairs: &[(usize, usize)] = match idx {
                1 | 14 => &[(3, 0)],
                2 | 13 => &[(0, 1)],
                3 | 12 => &[(3, 1)],
                4 | 11 => &[(1, 2)],
                6 | 9 => &[(0, 2)],
                7 | 8 => &[(3, 2)],
                5 => &[(3, 0), (1, 2)],
                10 => &[(0, 1), (3, 2)],
                _ => &[],
            };
            for (e1, e2) in pairs {
                segments.push((edge(*e1), edge(*e2)));
            }
        }
    }
    stitch(segments, dx.min(dy) * 1e-6)
}

/// Join segments end-to-end into polylines; endpoints closer than `tol` are
/// considered identical.
fn stitch(mut segments: Vec<((f64, f64), (f64, f64))>, tol: f64) -> Vec<Polyline> {
    let close = |a: (f64, f64), b: (f64, f64)| -> bool {
        (a.0 - b.0).abs() <= tol && (a.1 - b.1).abs() <= tol
    };
    let mut out = Vec::new();
    while let Some((a, b)) = segments.pop() {
        let mut pts = vec![a, b];
        loop {
            let tail = *pts.last().expect("nonempty");
            let next = segments.iter().position(|(s, e)| close(*s, tail) || close(*e, tail));
            match next {
                Some(k) => {
                    let (s, e) = segments.swap_remove(k);
                    pts.push(if close(s, tail) { e } else { s });
                }
                None => break,
            }
        }
        // Extend from the head too, in case we started mid-chain.
        loop {
            let head = pts[0];
            let next = segments.iter().position(|(s, e)| close(*s, head) || close(*e, head));
            match next {
                Some(k) => {
                    let (s, e) = segments.swap_remove(k);
                    pts.insert(0, if close(s, head) { e } else { s });
                }
                None => break,
            }
        }
        out.push(Polyline { points: pts });
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn circle_contour_is_one_closed_loop() {
        let loops = march(
            |x, y| x * x + y * y,
            (-2.0, 2.0, -2.0, 2.0),
            128,
            1.0,
        );
        assert_eq!(loops.len(), 1);
        let pts = &loops[0].points;
        assert!(pts.len() > 100);
        for (x, y) in pts {
            let r = (x * x + y * y).sqrt();
            assert!((r - 1.0).abs() < 0.01, "r = {r}");
        }
        // Closed: endpoints coincide.
        let first = pts[0];
        let last = *pts.last().unwrap();
        assert!((first.0 - last.0).abs() < 1e-3 && (first.1 - last.1).abs() < 1e-3);
    }

    #[test]
    fn empty_when_level_outside_range() {
        let loops = march(|x, y| x * x + y * y, (-1.0, 1.0, -1.0, 1.0), 32, 9.0);
        assert!(loops.is_empty());
    }
}
