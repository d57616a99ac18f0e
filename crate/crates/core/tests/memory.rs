//! Scratch memory of the coverage scan must not grow with k.

use std::alloc::{GlobalAlloc, Layout, System};
use std::sync::atomic::{AtomicUsize, Ordering};

use ca_forge::coverage::uncovered_sequential;
use ca_forge::groups::{OrbitTable, SymbolGroup};
use ca_forge::rng::{random_array, stream, Purpose};
use ca_forge::GroupKind;

struct Counting;

static LIVE: AtomicUsize = AtomicUsize::new(0);
static PEAK: AtomicUsize = AtomicUsize::new(0);

unsafe impl GlobalAlloc for Counting {
    unsafe fn alloc(&self, layout: Layout) -> *mut u8 {
        let now = LIVE.fetch_add(layout.size(), Ordering::SeqCst) + layout.size();
        PEAK.fetch_max(now, Ordering::SeqCst);
        System.alloc(layout)
    }

    unsafe fn dealloc(&self, ptr: *mut u8, layout: Layout) {
        LIVE.fetch_sub(layout.size(), Ordering::SeqCst);
        System.dealloc(ptr, layout)
    }
}

#[global_allocator]
static GLOBAL: Counting = Counting;

fn scratch_peak(k: usize, n: usize) -> (usize, u64) {
    let table = OrbitTable::new(&SymbolGroup::new(GroupKind::Trivial, 3).unwrap(), 4).unwrap();
    let array = random_array(&mut stream(11, Purpose::Stage1, 0), n, k, 3);
    let base = LIVE.load(Ordering::SeqCst);
    PEAK.store(base, Ordering::SeqCst);
    let report = uncovered_sequential(&array, &table, u64::MAX);
    let peak = PEAK.load(Ordering::SeqCst) - base;
    let out = report.uncovered.len() * (std::mem::size_of::<ca_forge::Interaction>() + 4 * 8 + 4);
    (peak.saturating_sub(out * 2), report.uncovered_count)
}

#[test]
fn scan_scratch_is_independent_of_k() {
    // 400 rows leave almost nothing uncovered at t=4, v=3, so the output list stays small.
    let (small, _) = scratch_peak(10, 400);
    let (large, _) = scratch_peak(40, 400);
    let budget = 3 * 400 * 4 + 81 * 4 + 4096;
    assert!(small <= budget, "k=10 scratch {small} > {budget}");
    assert!(large <= budget, "k=40 scratch {large} > {budget}");
}
