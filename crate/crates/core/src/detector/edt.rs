//! Exact Euclidean distance transform (lower envelope of parabolas, run once
//! per column and once per row).

/// Squared distance, in cells, from every cell to the nearest feature cell.
/// Cells are infinitely far away when the grid has no feature.
pub fn squared_edt(width: usize, height: usize, is_feature: impl Fn(usize, usize) -> bool) -> Vec<f64> {
    let mut d = vec![f64::INFINITY; width * height];
    for row in 0..height {
        for col in 0..width {
            if is_feature(col, row) {
                d[row * width + col] = 0.0;
            }
        }
    }
    let longest = width.max(height);
    let mut f = vec![0.0; longest];
    let mut out = vec![0.0; longest];
    let mut v = vec![0usize; longest];
    let mut z = vec![0.0; longest + 1];
    for col in 0..width {
        for row in 0..height {
            f[row] = d[row * width + col];
        }
        envelope(&f[..height], &mut out[..height], &mut v, &mut z);
        for row in 0..height {
            d[row * width + col] = out[row];
        }
    }
    for row in 0..height {
        f[..width].copy_from_slice(&d[row * width..(row + 1) * width]);
        envelope(&f[..width], &mut out[..width], &mut v, &mut z);
        d[row * width..(row + 1) * width].copy_from_slice(&out[..width]);
    }
    d
}

/// One-dimensional squared distance transform of the sampled function `f`.
fn envelope(f: &[f64], out: &mut [f64], v: &mut [usize], z: &mut [f64]) {
    let mut k: usize = 0;
    let mut any = false;
    for (q, &fv) in f.iter().enumerate() {
        if fv.is_infinite() {
            continue;
        }
        if !any {
            any = true;
            v[0] = q;
            z[0] = f64::NEG_INFINITY;
            z[1] = f64::INFINITY;
            continue;
        }
        let fq = fv + (q * q) as f64;
        // z[0] is -inf, so the scan stops at k = 0 at the latest.
        let mut s;
        loop {
            let p = v[k];
            s = (fq - (f[p] + (p * p) as f64)) / (2.0 * (q as f64 - p as f64));
            if s <= z[k] {
                k -= 1;
            } else {
                break;
            }
        }
        k += 1;
        v[k] = q;
        z[k] = s;
        z[k + 1] = f64::INFINITY;
    }
    if !any {
        out.fill(f64::INFINITY);
        return;
    }
    let mut k = 0;
    for (q, o) in out.iter_mut().enumerate() {
        while z[k + 1] < q as f64 {
            k += 1;
        }
        let p = v[k];
        let dq = q as f64 - p as f64;
        *o = dq * dq + f[p];
    }
}
