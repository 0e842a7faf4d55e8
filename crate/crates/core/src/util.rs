//! Small shared helpers: worker-pool map with a deterministic merge.

/// Worker count: TRL_THREADS if set, else available parallelism, at least 1.
pub fn worker_count() -> usize {
    if let Ok(v) = std::env::var("TRL_THREADS") {
        if let Ok(n) = v.trim().parse::<usize>() {
            return n.max(1);
        }
    }
    std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)
}

/// Map `f` over 0..total in parallel contiguous chunks; results are
/// concatenated in index order, so the outcome is independent of the worker
/// count.
pub fn par_map_indexed<R: Send>(total: usize, f: impl Fn(usize) -> R + Sync) -> Vec<R> {
    let workers = worker_count().min(total.max(1));
    if workers <= 1 || total < 128 {
        return (0..total).map(f).collect();
    }
    let chunk = total.div_ceil(workers);
    let mut out: Vec<Vec<R>> = Vec::new();
    std::thread::scope(|scope| {
        let mut handles = Vec::new();
        for w in 0..workers {
            let lo = w * chunk;
            let hi = ((w + 1) * chunk).min(total);
            if lo >= hi {
                break;
            }
            let fref = &f;
            handles.push(scope.spawn(move || (lo..hi).map(fref).collect::<Vec<R>>()));
        }
        for h in handles {
            out.push(h.join().expect("worker panicked"));
        }
    });
    out.into_iter().flatten().collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_merge() {
        let got = par_map_indexed(1000, |i| i * i);
        let want: Vec<usize> = (0..1000).map(|i| i * i).collect();
        assert_eq!(got, want);
    }
}
