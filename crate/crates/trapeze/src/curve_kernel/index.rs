//! Uniform bucket grid over a point cloud for nearest-neighbour queries.

use num_complex::Complex64;

#[derive(Debug, Clone)]
pub struct PointGrid {
    origin: Complex64,
    cell: f64,
    nx: usize,
    ny: usize,
    starts: Vec<u32>,
    items: Vec<u32>,
}

impl PointGrid {
    pub fn new(points: &[Complex64]) -> PointGrid {
        let (mut lo, mut hi) = (points[0], points[0]);
        for p in points {
            lo = Complex64::new(lo.re.min(p.re), lo.im.min(p.im));
            hi = Complex64::new(hi.re.max(p.re), hi.im.max(p.im));
        }
        let span = (hi - lo).norm().max(1e-300);
        let side = ((points.len() as f64).sqrt().ceil() as usize).max(1);
        let cell = span / side as f64;
        let nx = (((hi.re - lo.re) / cell).floor() as usize + 1).max(1);
        let ny = (((hi.im - lo.im) / cell).floor() as usize + 1).max(1);
        let mut counts = vec![0u32; nx * ny + 1];
        let keys: Vec<usize> = points
            .iter()
            .map(|p| {
                let (i, j) = Self::locate(lo, cell, nx, ny, *p);
                j * nx + i
            })
            .collect();
        for &k in &keys {
            counts[k + 1] += 1;
        }
        for k in 0..nx * ny {
            counts[k + 1] += counts[k];
        }
        let mut fill = counts.clone();
        let mut items = vec![0u32; points.len()];
        for (idx, &k) in keys.iter().enumerate() {
            items[fill[k] as usize] = idx as u32;
            fill[k] += 1;
        }
        PointGrid {
            origin: lo,
            cell,
            nx,
            ny,
            starts: counts,
            items,
        }
    }

    fn locate(origin: Complex64, cell: f64, nx: usize, ny: usize, p: Complex64) -> (usize, usize) {
        let fx = ((p.re - origin.re) / cell).floor();
        let fy = ((p.im - origin.im) / cell).floor();
        let i = fx.clamp(0.0, (nx - 1) as f64) as usize;
        let j = fy.clamp(0.0, (ny - 1) as f64) as usize;
        (i, j)
    }

    fn bucket(&self, i: usize, j: usize) -> &[u32] {
        let k = j * self.nx + i;
        &self.items[self.starts[k] as usize..self.starts[k + 1] as usize]
    }

    /// Index and distance of the nearest point.
    pub fn nearest(&self, points: &[Complex64], p: Complex64) -> (usize, f64) {
        let (ci, cj) = Self::locate(self.origin, self.cell, self.nx, self.ny, p);
        let mut best = (usize::MAX, f64::INFINITY);
        let max_ring = self.nx.max(self.ny);
        for ring in 0..=max_ring {
            self.for_ring(ci, cj, ring, |idx| {
                let d = (points[idx] - p).norm();
                if d < best.1 || (d == best.1 && idx < best.0) {
                    best = (idx, d);
                }
            });
            if best.1 <= ring as f64 * self.cell {
                break;
            }
        }
        best
    }

    /// Indices of all points within `radius` of `p`, unsorted.
    pub fn within(&self, points: &[Complex64], p: Complex64, radius: f64, out: &mut Vec<usize>) {
        out.clear();
        let lo = p - Complex64::new(radius, radius);
        let hi = p + Complex64::new(radius, radius);
        let (i0, j0) = Self::locate(self.origin, self.cell, self.nx, self.ny, lo);
        let (i1, j1) = Self::locate(self.origin, self.cell, self.nx, self.ny, hi);
        for j in j0..=j1 {
            for i in i0..=i1 {
                for &idx in self.bucket(i, j) {
                    if (points[idx as usize] - p).norm() <= radius {
                        out.push(idx as usize);
                    }
                }
            }
        }
    }

    fn for_ring<F: FnMut(usize)>(&self, ci: usize, cj: usize, ring: usize, mut f: F) {
        let (ci, cj, ring) = (ci as isize, cj as isize, ring as isize);
        let (nx, ny) = (self.nx as isize, self.ny as isize);
        for j in (cj - ring)..=(cj + ring) {
            if j < 0 || j >= ny {
                continue;
            }
            let on_edge = j == cj - ring || j == cj + ring;
            let step = if on_edge || ring == 0 { 1 } else { 2 * ring };
            let mut i = ci - ring;
            while i <= ci + ring {
                if i >= 0 && i < nx {
                    for &idx in self.bucket(i as usize, j as usize) {
                        f(idx as usize);
                    }
                }
                i += step;
            }
        }
    }
}
