use std::sync::{Condvar, Mutex, MutexGuard, PoisonError};

/// Round-robin baton for sequential mode: exactly one searcher thread runs at
/// a time and hands over after `quantum` decoder calls (or when it finishes).
#[derive(Debug)]
pub(crate) struct Turnstile {
    quantum: u64,
    state: Mutex<TurnState>,
    cv: Condvar,
}

#[derive(Debug)]
struct TurnState {
    current: usize,
    used: u64,
    done: Vec<bool>,
}

impl Turnstile {
    pub(crate) fn new(participants: usize, quantum: u64) -> Self {
        Self {
            quantum: quantum.max(1),
            state: Mutex::new(TurnState {
                current: 0,
                used: 0,
                done: vec![false; participants],
            }),
            cv: Condvar::new(),
        }
    }

    fn lock(&self) -> MutexGuard<'_, TurnState> {
        self.state.lock().unwrap_or_else(PoisonError::into_inner)
    }

    fn wait_for<'a>(&self, mut s: MutexGuard<'a, TurnState>, id: usize) -> MutexGuard<'a, TurnState> {
        while s.current != id {
            s = self.cv.wait(s).unwrap_or_else(PoisonError::into_inner);
        }
        s
    }

    pub(crate) fn wait_turn(&self, id: usize) {
        let s = self.lock();
        drop(self.wait_for(s, id));
    }

    /// Count one decoder call for `id`; yields the turn when the quantum is used.
    pub(crate) fn tick(&self, id: usize) {
        let mut s = self.lock();
        if s.current != id {
            return;
        }
        s.used += 1;
        if s.used >= self.quantum {
            s.used = 0;
            s.current = next_active(&s.done, id);
            if s.current != id {
                self.cv.notify_all();
                drop(self.wait_for(s, id));
            }
        }
    }

    pub(crate) fn finish(&self, id: usize) {
        let mut s = self.lock();
        s.done[id] = true;
        if s.current == id {
            s.used = 0;
            s.current = next_active(&s.done, id);
            self.cv.notify_all();
        }
    }
}

/// Next unfinished participant after `id`, cycling; `id` itself if it is the
/// only one left (or if every participant is done).
fn next_active(done: &[bool], id: usize) -> usize {
    let n = done.len();
    (1..=n)
        .map(|step| (id + step) % n)
        .find(|&j| !done[j])
        .unwrap_or(id)
}
