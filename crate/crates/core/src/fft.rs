//! Process-wide cache of FFT plans keyed by scalar type and length.

use std::any::{Any, TypeId};
use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use once_cell::sync::Lazy;
use rustfft::{Fft, FftPlanner};

use crate::scalar::{Real, C};

type PlanKey = (TypeId, usize, bool);

static PLANS: Lazy<Mutex<HashMap<PlanKey, Box<dyn Any + Send + Sync>>>> =
    Lazy::new(|| Mutex::new(HashMap::new()));

fn plan<T: Real>(n: usize, inverse: bool) -> Arc<dyn Fft<T>> {
    let key = (TypeId::of::<T>(), n, inverse);
    let mut plans = PLANS.lock().expect("fft plan cache poisoned");
    if let Some(p) = plans.get(&key) {
        if let Some(p) = p.downcast_ref::<Arc<dyn Fft<T>>>() {
            return p.clone();
        }
    }
    let mut planner = FftPlanner::<T>::new();
    let p = if inverse { planner.plan_fft_inverse(n) } else { planner.plan_fft_forward(n) };
    plans.insert(key, Box::new(p.clone()));
    p
}

/// Unnormalized forward DFT `X_k = Σ_j x_j e^{−2πijk/n}`.
pub fn forward<T: Real>(buf: &mut [C<T>]) {
    if buf.len() > 1 {
        plan::<T>(buf.len(), false).process(buf);
    }
}

/// Inverse DFT including the `1/n` normalization.
pub fn inverse<T: Real>(buf: &mut [C<T>]) {
    let n = buf.len();
    if n > 1 {
        plan::<T>(n, true).process(buf);
    }
    let s = T::one() / T::of_usize(n);
    for v in buf.iter_mut() {
        *v = *v * s;
    }
}

/// Signed DFT index: `k` for `k < n/2`, `k − n` otherwise (Nyquist maps to `−n/2`).
#[inline]
pub fn signed_index(k: usize, n: usize) -> isize {
    if k < n / 2 {
        k as isize
    } else {
        k as isize - n as isize
    }
}
