//! Thread-backed execution with results independent of the thread count.

use std::thread;

use quartet_core::ncd::{assemble, check_corpus, concat, Compressor, CorpusItem, NcdMatrix};
use quartet_core::search::{RoundStepper, SearchRun};

/// Number of threads to use when none is requested.
pub fn default_threads() -> usize {
    thread::available_parallelism().map_or(1, |n| n.get())
}

/// `f(0), f(1), ...` computed on up to `threads` threads, returned in index
/// order.
pub fn map_indexed<T, F>(count: usize, threads: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync,
{
    let threads = threads.clamp(1, count.max(1));
    if threads == 1 {
        return (0..count).map(f).collect();
    }
    let f = &f;
    let mut out: Vec<Option<T>> = (0..count).map(|_| None).collect();
    let chunk = count.div_ceil(threads);
    thread::scope(|s| {
        for (c, slots) in out.chunks_mut(chunk).enumerate() {
            s.spawn(move || {
                for (k, slot) in slots.iter_mut().enumerate() {
                    *slot = Some(f(c * chunk + k));
                }
            });
        }
    });
    out.into_iter().map(|x| x.expect("every slot filled")).collect()
}

/// Steps agreement runs on scoped threads, one contiguous group per thread.
#[derive(Debug, Clone, Copy)]
pub struct Threaded {
    pub threads: usize,
}

impl RoundStepper for Threaded {
    fn step(&self, runs: &mut [SearchRun<'_>], budgets: &[u64]) -> quartet_core::Result<()> {
        let threads = self.threads.clamp(1, runs.len().max(1));
        if threads == 1 {
            return quartet_core::search::Sequential.step(runs, budgets);
        }
        let chunk = runs.len().div_ceil(threads);
        thread::scope(|s| {
            let handles: Vec<_> = runs
                .chunks_mut(chunk)
                .zip(budgets.chunks(chunk))
                .map(|(group, b)| {
                    s.spawn(move || {
                        for (run, &budget) in group.iter_mut().zip(b) {
                            run.generation(budget)?;
                        }
                        Ok(())
                    })
                })
                .collect();
            handles.into_iter().try_for_each(|h| h.join().expect("search thread panicked"))
        })
    }
}

/// [`quartet_core::ncd::ncd_matrix`] with the compressions spread over
/// threads.
pub fn ncd_matrix<Z: Compressor + Sync>(items: &[CorpusItem], z: &Z, threads: usize) -> quartet_core::Result<NcdMatrix> {
    check_corpus(items)?;
    let n = items.len();
    let singles = map_indexed(n, threads, |i| z.compressed_len(&items[i].bytes));
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    let lens = map_indexed(pairs.len(), threads, |p| {
        let (i, j) = pairs[p];
        let (x, y) = (&items[i].bytes, &items[j].bytes);
        (z.compressed_len(&concat(x, y)), z.compressed_len(&concat(y, x)))
    });
    let mut next = lens.into_iter();
    assemble(items, &singles, |_, _| next.next().expect("one entry per pair"))
}
