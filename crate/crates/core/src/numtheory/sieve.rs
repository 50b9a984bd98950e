use std::sync::{LazyLock, RwLock};

/// Largest bound the sieve will grow to on its own. Primality of larger
/// values is decided by a deterministic Miller-Rabin test.
const SIEVE_CEILING: u64 = 1 << 26;
const INITIAL_LIMIT: u64 = 1 << 12;

static GLOBAL: LazyLock<PrimeSieve> = LazyLock::new(PrimeSieve::new);

/// Process-wide sieve shared by all number-theoretic helpers.
pub fn sieve() -> &'static PrimeSieve {
    &GLOBAL
}

#[derive(Debug)]
struct SieveState {
    limit: u64,
    primes: Vec<u64>,
}

/// Incremental sieve of Eratosthenes. Extension happens under a write lock,
/// so concurrent readers always see a complete prefix of the primes.
#[derive(Debug)]
pub struct PrimeSieve {
    state: RwLock<SieveState>,
}

impl Default for PrimeSieve {
    fn default() -> Self {
        Self::new()
    }
}

impl PrimeSieve {
    pub fn new() -> Self {
        let primes = simple_sieve(INITIAL_LIMIT);
        Self {
            state: RwLock::new(SieveState {
                limit: INITIAL_LIMIT,
                primes,
            }),
        }
    }

    pub fn limit(&self) -> u64 {
        self.state.read().unwrap().limit
    }

    /// Grow the sieve so that it covers at least `[2, limit]`.
    pub fn ensure(&self, limit: u64) {
        if self.limit() >= limit {
            return;
        }
        let mut state = self.state.write().unwrap();
        while state.limit < limit {
            let new_limit = limit.max(state.limit.saturating_mul(2));
            extend_segment(&mut state, new_limit);
        }
    }

    pub fn primes_up_to(&self, limit: u64) -> Vec<u64> {
        self.ensure(limit);
        let state = self.state.read().unwrap();
        let end = state.primes.partition_point(|&p| p <= limit);
        state.primes[..end].to_vec()
    }

    /// The `k` smallest primes.
    pub fn first(&self, k: usize) -> Vec<u64> {
        loop {
            {
                let state = self.state.read().unwrap();
                if state.primes.len() >= k {
                    return state.primes[..k].to_vec();
                }
            }
            let limit = self.limit();
            self.ensure(limit * 2);
        }
    }

    /// The `k`-th prime, zero-based (`nth(0) == 2`).
    pub fn nth(&self, k: usize) -> u64 {
        self.first(k + 1)[k]
    }

    pub fn is_prime(&self, n: u64) -> bool {
        if n < 2 {
            return false;
        }
        if n <= SIEVE_CEILING {
            self.ensure(n);
            let state = self.state.read().unwrap();
            return state.primes.binary_search(&n).is_ok();
        }
        miller_rabin(n)
    }

    /// Smallest prime strictly greater than `x`, or `None` past `u64::MAX`.
    pub fn next_prime_after(&self, x: u64) -> Option<u64> {
        if x < SIEVE_CEILING {
            let mut bound = (x + 1).max(INITIAL_LIMIT);
            loop {
                let bound_clamped = bound.min(SIEVE_CEILING);
                self.ensure(bound_clamped);
                {
                    let state = self.state.read().unwrap();
                    let idx = state.primes.partition_point(|&p| p <= x);
                    if idx < state.primes.len() {
                        return Some(state.primes[idx]);
                    }
                }
                if bound_clamped == SIEVE_CEILING {
                    break;
                }
                bound = bound.saturating_mul(2);
            }
        }
        let mut candidate = x.checked_add(1)?;
        loop {
            if self.is_prime(candidate) {
                return Some(candidate);
            }
            candidate = candidate.checked_add(1)?;
        }
    }
}

fn simple_sieve(limit: u64) -> Vec<u64> {
    let n = limit as usize;
    let mut composite = vec![false; n + 1];
    let mut primes = Vec::new();
    for i in 2..=n {
        if !composite[i] {
            primes.push(i as u64);
            let mut j = i * i;
            while j <= n {
                composite[j] = true;
                j += i;
            }
        }
    }
    primes
}

/// Sieve `(state.limit, new_limit]` using the primes already known.
fn extend_segment(state: &mut SieveState, new_limit: u64) {
    let root = new_limit.isqrt();
    if root > state.limit {
        extend_segment(state, root);
    }
    let lo = state.limit + 1;
    let len = (new_limit - state.limit) as usize;
    let mut composite = vec![false; len];
    for &p in &state.primes {
        if p * p > new_limit {
            break;
        }
        let start = (p * p).max(lo.div_ceil(p) * p);
        let mut j = start;
        while j <= new_limit {
            composite[(j - lo) as usize] = true;
            j += p;
        }
    }
    for (offset, &c) in composite.iter().enumerate() {
        if !c {
            state.primes.push(lo + offset as u64);
        }
    }
    state.limit = new_limit;
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Miller-Rabin with the first twelve prime bases; exact for every `u64`.
fn miller_rabin(n: u64) -> bool {
    const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    if n < 2 {
        return false;
    }
    for &p in &BASES {
        if n % p == 0 {
            return n == p;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for &a in &BASES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}
