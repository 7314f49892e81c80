//! Data-parallel iteration seam.
//!
//! With the `parallel` feature (default) the helpers fan work out over
//! rayon; without it they run sequentially. Every caller reduces results
//! in a fixed index order, so both builds produce bit-identical numbers.

#[cfg(feature = "parallel")]
pub(crate) fn map_indexed<U, F>(n: usize, f: F) -> Vec<U>
where
    U: Send,
    F: Fn(usize) -> U + Sync + Send,
{
    use rayon::prelude::*;
    (0..n).into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub(crate) fn map_indexed<U, F>(n: usize, f: F) -> Vec<U>
where
    F: Fn(usize) -> U,
{
    (0..n).map(f).collect()
}

/// Applies `f` to each `width`-sized row of `buf` with its row index.
#[cfg(feature = "parallel")]
pub(crate) fn for_each_row<F>(buf: &mut [f64], width: usize, f: F)
where
    F: Fn(usize, &mut [f64]) + Sync + Send,
{
    use rayon::prelude::*;
    buf.par_chunks_mut(width)
        .enumerate()
        .for_each(|(i, row)| f(i, row));
}

#[cfg(not(feature = "parallel"))]
pub(crate) fn for_each_row<F>(buf: &mut [f64], width: usize, f: F)
where
    F: Fn(usize, &mut [f64]),
{
    for (i, row) in buf.chunks_mut(width).enumerate() {
        f(i, row);
    }
}

/// Row-parallel map over two equally long row-matrices.
#[cfg(feature = "parallel")]
pub(crate) fn for_each_row2<F>(a: &mut [f64], wa: usize, b: &mut [f64], wb: usize, f: F)
where
    F: Fn(usize, &mut [f64], &mut [f64]) + Sync + Send,
{
    use rayon::prelude::*;
    a.par_chunks_mut(wa)
        .zip(b.par_chunks_mut(wb))
        .enumerate()
        .for_each(|(i, (ra, rb))| f(i, ra, rb));
}

#[cfg(not(feature = "parallel"))]
pub(crate) fn for_each_row2<F>(a: &mut [f64], wa: usize, b: &mut [f64], wb: usize, f: F)
where
    F: Fn(usize, &mut [f64], &mut [f64]),
{
    for (i, (ra, rb)) in a.chunks_mut(wa).zip(b.chunks_mut(wb)).enumerate() {
        f(i, ra, rb);
    }
}

/// Row-parallel map over three equally long row-matrices.
#[cfg(feature = "parallel")]
pub(crate) fn for_each_row3<F>(
    a: &mut [f64],
    wa: usize,
    b: &mut [f64],
    wb: usize,
    c: &mut [f64],
    wc: usize,
    f: F,
) where
    F: Fn(usize, &mut [f64], &mut [f64], &mut [f64]) + Sync + Send,
{
    use rayon::prelude::*;
    a.par_chunks_mut(wa)
        .zip(b.par_chunks_mut(wb))
        .zip(c.par_chunks_mut(wc))
        .enumerate()
        .for_each(|(i, ((ra, rb), rc))| f(i, ra, rb, rc));
}

#[cfg(not(feature = "parallel"))]
pub(crate) fn for_each_row3<F>(
    a: &mut [f64],
    wa: usize,
    b: &mut [f64],
    wb: usize,
    c: &mut [f64],
    wc: usize,
    f: F,
) where
    F: Fn(usize, &mut [f64], &mut [f64], &mut [f64]),
{
    for (i, ((ra, rb), rc)) in a
        .chunks_mut(wa)
        .zip(b.chunks_mut(wb))
        .zip(c.chunks_mut(wc))
        .enumerate()
    {
        f(i, ra, rb, rc);
    }
}
