use crate::objective::sq_dist;
use crate::types::Dataset;

const TOL: f64 = 1e-7;
const MAX_ITERS: usize = 100;
/// Distances at or below this count as coinciding with the iterate.
const COINCIDENT: f64 = 1e-12;

/// Geometric median of `data[members]` by Weiszfeld iteration from `start`.
///
/// Uses the Vardi-Zhang step when the iterate sits on a data point, so the
/// sum of distances never increases.
pub fn geometric_median(data: &Dataset, members: &[usize], start: &[f64]) -> Vec<f64> {
    let dim = data.dim();
    let mut y = start.to_vec();
    if members.is_empty() {
        return y;
    }
    let mut num = vec![0.0; dim];
    let mut pull = vec![0.0; dim];
    for _ in 0..MAX_ITERS {
        num.iter_mut().for_each(|v| *v = 0.0);
        pull.iter_mut().for_each(|v| *v = 0.0);
        let mut den = 0.0;
        let mut coincident = 0usize;
        for &i in members {
            let x = data.point(i);
            let d = sq_dist(x, &y).sqrt();
            if d <= COINCIDENT {
                coincident += 1;
                continue;
            }
            let w = 1.0 / d;
            den += w;
            for a in 0..dim {
                num[a] += x[a] * w;
                pull[a] += (x[a] - y[a]) * w;
            }
        }
        if den == 0.0 {
            return y;
        }
        let next: Vec<f64> = if coincident == 0 {
            num.iter().map(|v| v / den).collect()
        } else {
            let r = pull.iter().map(|v| v * v).sum::<f64>().sqrt();
            let eta = coincident as f64;
            if r <= eta {
                return y;
            }
            let t = eta / r;
            num.iter().zip(&y).map(|(v, yi)| (1.0 - t) * (v / den) + t * yi).collect()
        };
        let step = sq_dist(&next, &y).sqrt();
        let scale = 1.0 + y.iter().map(|v| v * v).sum::<f64>().sqrt();
        y = next;
        if step <= TOL * scale {
            break;
        }
    }
    y
}

#[cfg(test)]
mod tests {
    use super::*;

    fn total(data: &Dataset, m: &[f64]) -> f64 {
        data.points().map(|p| sq_dist(p, m).sqrt()).sum()
    }

    #[test]
    fn odd_line_median_is_middle_point() {
        let d = Dataset::from_scalars("t", &[0.0, 1.0, 10.0]).unwrap();
        let m = geometric_median(&d, &[0, 1, 2], &[3.0]);
        assert!((m[0] - 1.0).abs() < 1e-6, "{m:?}");
    }

    #[test]
    fn square_corners_give_the_center() {
        let d = Dataset::from_rows("t", &[[0.0, 0.0], [2.0, 0.0], [0.0, 2.0], [2.0, 2.0]]).unwrap();
        let m = geometric_median(&d, &[0, 1, 2, 3], &[0.0, 0.0]);
        assert!((m[0] - 1.0).abs() < 1e-5 && (m[1] - 1.0).abs() < 1e-5, "{m:?}");
    }

    #[test]
    fn never_worse_than_start() {
        let d = Dataset::from_rows("t", &[[0.0, 0.0], [5.0, 1.0], [1.0, 7.0], [1.0, 7.0], [-3.0, 2.0]]).unwrap();
        let start = [1.0, 7.0];
        let m = geometric_median(&d, &[0, 1, 2, 3, 4], &start);
        assert!(total(&d, &m) <= total(&d, &start));
    }
}
