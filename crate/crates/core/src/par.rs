//! Data-parallel helpers. With the `parallel` feature disabled every helper
//! runs sequentially; results are identical in both modes.

use serde::{Deserialize, Serialize};

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// How independent work items are scheduled.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum ExecMode {
    Sequential,
    #[default]
    Parallel,
}

impl ExecMode {
    fn parallel(self) -> bool {
        cfg!(feature = "parallel") && self == ExecMode::Parallel
    }
}

/// `(0..n).map(f)` collected in index order.
pub fn map_indexed<T, F>(n: usize, mode: ExecMode, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if mode.parallel() {
        return (0..n).into_par_iter().map(f).collect();
    }
    let _ = mode;
    (0..n).map(f).collect()
}

/// Applies `f` to every `chunk`-sized block of `data` together with its block index.
pub fn for_each_chunk_mut<T, F>(data: &mut [T], chunk: usize, mode: ExecMode, f: F)
where
    T: Send,
    F: Fn(usize, &mut [T]) + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if mode.parallel() && data.len() > chunk {
        data.par_chunks_mut(chunk).enumerate().for_each(|(i, c)| f(i, c));
        return;
    }
    let _ = mode;
    data.chunks_mut(chunk).enumerate().for_each(|(i, c)| f(i, c));
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn modes_agree() {
        let seq = map_indexed(1000, ExecMode::Sequential, |i| i * i);
        let par = map_indexed(1000, ExecMode::Parallel, |i| i * i);
        assert_eq!(seq, par);

        let mut a: Vec<u64> = (0..4096).collect();
        let mut b = a.clone();
        for_each_chunk_mut(&mut a, 64, ExecMode::Sequential, |i, c| {
            c.iter_mut().for_each(|x| *x += i as u64)
        });
        for_each_chunk_mut(&mut b, 64, ExecMode::Parallel, |i, c| {
            c.iter_mut().for_each(|x| *x += i as u64)
        });
        assert_eq!(a, b);
    }
}
