//! Logical sharding of the global index space inside one process.
//!
//! Each shard owns a set of global rows and keeps its vectors in local
//! numbering: owned entries first (ascending global index), then halo copies
//! of the off-shard entries its rows reference. A halo exchange is a
//! collective step that packs every send list and then unpacks into the
//! receivers, so its result does not depend on visiting order. Reductions sum
//! per-shard partials in ascending shard order.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use crate::krylov::{KrylovVector, LinearOperator, Preconditioner, SolveError};
use crate::sparse::{CsrMatrix, Format, SparseMatrix};

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum PartitionError {
    #[error("shard count must be at least 1")]
    NoShards,
    #[error("explicit partition lists {found} shards, expected {expected}")]
    ShardCount { expected: usize, found: usize },
    #[error("global index {index} is owned by more than one shard")]
    Overlap { index: usize },
    #[error("global index {index} is not owned by any shard")]
    Uncovered { index: usize },
    #[error("global index {index} out of range for {n} unknowns")]
    OutOfRange { index: usize, n: usize },
    #[error("adjacency is {rows}x{cols}, expected a square matrix of order {n}")]
    AdjacencyShape { rows: usize, cols: usize, n: usize },
    #[error("inconsistent shard family: {0}")]
    FamilyMismatch(String),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PartitionScheme {
    /// Contiguous blocks by global index; the first `N mod S` shards get one
    /// extra row.
    Block,
    /// Owned global indices per shard.
    Explicit(Vec<Vec<usize>>),
}

/// Index-space view of one shard.
#[derive(Debug, Clone, PartialEq)]
pub struct Descriptor {
    shard_id: usize,
    n_shards: usize,
    n_global: usize,
    owned: Vec<usize>,
    halo: Vec<usize>,
    g2l: HashMap<usize, usize>,
    /// (neighbour, owned local indices it needs), ascending neighbour.
    sends: Vec<(usize, Vec<usize>)>,
    /// (owner, halo local indices it fills), aligned with the owner's sends.
    recvs: Vec<(usize, Vec<usize>)>,
    assembled: bool,
}

impl Descriptor {
    pub fn shard_id(&self) -> usize {
        self.shard_id
    }

    pub fn n_shards(&self) -> usize {
        self.n_shards
    }

    pub fn n_global(&self) -> usize {
        self.n_global
    }

    pub fn owned_globals(&self) -> &[usize] {
        &self.owned
    }

    pub fn halo_globals(&self) -> &[usize] {
        &self.halo
    }

    pub fn n_owned(&self) -> usize {
        self.owned.len()
    }

    pub fn n_local(&self) -> usize {
        self.owned.len() + self.halo.len()
    }

    pub fn neighbour_sends(&self) -> &[(usize, Vec<usize>)] {
        &self.sends
    }

    pub fn neighbour_recvs(&self) -> &[(usize, Vec<usize>)] {
        &self.recvs
    }

    pub fn is_assembled(&self) -> bool {
        self.assembled
    }

    pub fn global_to_local(&self, g: usize) -> Option<usize> {
        self.g2l.get(&g).copied()
    }

    pub fn local_to_global(&self, l: usize) -> Option<usize> {
        if l < self.owned.len() {
            Some(self.owned[l])
        } else {
            self.halo.get(l - self.owned.len()).copied()
        }
    }
}

fn owner_map(n: usize, n_shards: usize, scheme: &PartitionScheme) -> Result<Vec<usize>, PartitionError> {
    match scheme {
        PartitionScheme::Block => {
            let base = n / n_shards;
            let rem = n % n_shards;
            let mut owner = Vec::with_capacity(n);
            for s in 0..n_shards {
                let len = base + usize::from(s < rem);
                owner.extend(std::iter::repeat_n(s, len));
            }
            Ok(owner)
        }
        PartitionScheme::Explicit(lists) => {
            if lists.len() != n_shards {
                return Err(PartitionError::ShardCount {
                    expected: n_shards,
                    found: lists.len(),
                });
            }
            let mut owner = vec![usize::MAX; n];
            for (s, list) in lists.iter().enumerate() {
                for &g in list {
                    if g >= n {
                        return Err(PartitionError::OutOfRange { index: g, n });
                    }
                    if owner[g] != usize::MAX {
                        return Err(PartitionError::Overlap { index: g });
                    }
                    owner[g] = s;
                }
            }
            if let Some(index) = owner.iter().position(|&o| o == usize::MAX) {
                return Err(PartitionError::Uncovered { index });
            }
            Ok(owner)
        }
    }
}

/// Builds the assembled descriptors of all shards. Halo entries are the
/// off-shard columns referenced by owned rows of `adjacency`.
pub fn build_descriptor(
    n_global: usize,
    n_shards: usize,
    scheme: &PartitionScheme,
    adjacency: &CsrMatrix,
) -> Result<Vec<Descriptor>, PartitionError> {
    if n_shards == 0 {
        return Err(PartitionError::NoShards);
    }
    if adjacency.n_rows() != n_global || adjacency.n_cols() != n_global {
        return Err(PartitionError::AdjacencyShape {
            rows: adjacency.n_rows(),
            cols: adjacency.n_cols(),
            n: n_global,
        });
    }
    let owner = owner_map(n_global, n_shards, scheme)?;
    let mut owned = vec![Vec::new(); n_shards];
    for (g, &s) in owner.iter().enumerate() {
        owned[s].push(g);
    }

    let mut halos: Vec<Vec<usize>> = Vec::with_capacity(n_shards);
    for list in &owned {
        let mut h: Vec<usize> = Vec::new();
        for &g in list {
            h.extend(adjacency.row(g).map(|(j, _)| j));
        }
        h.retain(|&j| owner[j] != owner[list[0]]);
        h.sort_unstable();
        h.dedup();
        halos.push(h);
    }

    let mut descs: Vec<Descriptor> = owned
        .into_iter()
        .zip(halos)
        .enumerate()
        .map(|(s, (owned, halo))| {
            let g2l = owned.iter().chain(&halo).enumerate().map(|(l, &g)| (g, l)).collect();
            Descriptor {
                shard_id: s,
                n_shards,
                n_global,
                owned,
                halo,
                g2l,
                sends: Vec::new(),
                recvs: Vec::new(),
                assembled: false,
            }
        })
        .collect();

    // sends[s][t]: what owner s ships to t, ordered by global index
    let mut sends: Vec<BTreeMap<usize, Vec<usize>>> = vec![BTreeMap::new(); n_shards];
    for t in 0..n_shards {
        let mut by_owner: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        let n_owned = descs[t].owned.len();
        for (k, &g) in descs[t].halo.iter().enumerate() {
            let s = owner[g];
            by_owner.entry(s).or_default().push(n_owned + k);
            let l = descs[s].g2l[&g];
            sends[s].entry(t).or_default().push(l);
        }
        descs[t].recvs = by_owner.into_iter().collect();
    }
    for (d, s) in descs.iter_mut().zip(sends) {
        d.sends = s.into_iter().collect();
        d.assembled = true;
    }
    Ok(descs)
}

/// Owned and halo values of one shard in local numbering.
#[derive(Debug, Clone, PartialEq)]
pub struct ShardedVector {
    desc: Arc<Descriptor>,
    values: Vec<f64>,
    halo_fresh: bool,
}

impl ShardedVector {
    pub fn zeros(desc: Arc<Descriptor>) -> Self {
        let n = desc.n_local();
        Self {
            desc,
            values: vec![0.0; n],
            halo_fresh: false,
        }
    }

    pub fn descriptor(&self) -> &Descriptor {
        &self.desc
    }

    pub fn owned(&self) -> &[f64] {
        &self.values[..self.desc.n_owned()]
    }

    /// Writing owned values marks the halo stale.
    pub fn owned_mut(&mut self) -> &mut [f64] {
        self.halo_fresh = false;
        let n = self.desc.n_owned();
        &mut self.values[..n]
    }

    pub fn halo(&self) -> &[f64] {
        &self.values[self.desc.n_owned()..]
    }

    pub fn halo_fresh(&self) -> bool {
        self.halo_fresh
    }

    /// Overwrites every halo slot with NaN; exercises the exchange discipline.
    #[doc(hidden)]
    pub fn poison_halo(&mut self) {
        let n = self.desc.n_owned();
        self.values[n..].fill(f64::NAN);
        self.halo_fresh = false;
    }
}

/// One [`ShardedVector`] per shard, in shard order.
#[derive(Debug, Clone, PartialEq)]
pub struct DistVector {
    shards: Vec<ShardedVector>,
    exchanges: usize,
}

fn check_family(descs: &[Arc<Descriptor>]) -> Result<(), PartitionError> {
    let Some(first) = descs.first() else {
        return Err(PartitionError::NoShards);
    };
    for (s, d) in descs.iter().enumerate() {
        if d.shard_id != s || d.n_shards != descs.len() || d.n_global != first.n_global {
            return Err(PartitionError::FamilyMismatch(format!(
                "descriptor at position {s} is shard {} of {}",
                d.shard_id, d.n_shards
            )));
        }
        if !d.assembled {
            return Err(PartitionError::FamilyMismatch(format!("shard {s} is not assembled")));
        }
    }
    Ok(())
}

impl DistVector {
    pub fn zeros(descs: &[Arc<Descriptor>]) -> Result<Self, PartitionError> {
        check_family(descs)?;
        Ok(Self {
            shards: descs.iter().cloned().map(ShardedVector::zeros).collect(),
            exchanges: 0,
        })
    }

    /// Distributes a global vector; halos are filled and fresh.
    pub fn scatter(descs: &[Arc<Descriptor>], global: &[f64]) -> Result<Self, PartitionError> {
        let mut v = Self::zeros(descs)?;
        v.set_global(global)?;
        Ok(v)
    }

    fn set_global(&mut self, global: &[f64]) -> Result<(), PartitionError> {
        let n = self.n_global();
        if global.len() != n {
            return Err(PartitionError::DimensionMismatch {
                expected: n,
                found: global.len(),
            });
        }
        for sh in &mut self.shards {
            let d = Arc::clone(&sh.desc);
            for (v, &g) in sh.values.iter_mut().zip(d.owned.iter().chain(&d.halo)) {
                *v = global[g];
            }
            sh.halo_fresh = true;
        }
        Ok(())
    }

    pub fn gather(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.n_global()];
        for sh in &self.shards {
            for (v, &g) in sh.owned().iter().zip(&sh.desc.owned) {
                out[g] = *v;
            }
        }
        out
    }

    pub fn n_global(&self) -> usize {
        self.shards[0].desc.n_global
    }

    pub fn n_shards(&self) -> usize {
        self.shards.len()
    }

    pub fn shards(&self) -> &[ShardedVector] {
        &self.shards
    }

    pub fn shards_mut(&mut self) -> &mut [ShardedVector] {
        &mut self.shards
    }

    pub fn shard(&self, s: usize) -> &ShardedVector {
        &self.shards[s]
    }

    pub fn shard_mut(&mut self, s: usize) -> &mut ShardedVector {
        &mut self.shards[s]
    }

    /// Halo exchanges performed on this family so far.
    pub fn exchange_count(&self) -> usize {
        self.exchanges
    }

    fn conforms(&self, other: &Self) -> bool {
        self.shards.len() == other.shards.len()
            && self
                .shards
                .iter()
                .zip(&other.shards)
                .all(|(a, b)| Arc::ptr_eq(&a.desc, &b.desc) || a.desc == b.desc)
    }
}

/// Refreshes every halo slot from its owner.
pub fn halo_exchange(v: &mut DistVector) -> Result<(), PartitionError> {
    let descs: Vec<Arc<Descriptor>> = v.shards.iter().map(|s| Arc::clone(&s.desc)).collect();
    check_family(&descs)?;
    // pack: buffers[t] holds (owner, values) for every owner feeding t
    let mut buffers: Vec<Vec<(usize, Vec<f64>)>> = vec![Vec::new(); v.shards.len()];
    for (s, sh) in v.shards.iter().enumerate() {
        for (t, locals) in &sh.desc.sends {
            buffers[*t].push((s, locals.iter().map(|&l| sh.values[l]).collect()));
        }
    }
    // unpack
    for (sh, mut incoming) in v.shards.iter_mut().zip(buffers) {
        incoming.sort_by_key(|(s, _)| *s);
        let d = Arc::clone(&sh.desc);
        for ((owner, slots), (from, vals)) in d.recvs.iter().zip(&incoming) {
            if owner != from || slots.len() != vals.len() {
                return Err(PartitionError::FamilyMismatch(format!(
                    "shard {} expected data from {owner}, got {from}",
                    d.shard_id
                )));
            }
            for (&l, &x) in slots.iter().zip(vals) {
                sh.values[l] = x;
            }
        }
        sh.halo_fresh = true;
    }
    v.exchanges += 1;
    Ok(())
}

/// Owned rows of one shard with columns in local numbering.
#[derive(Debug, Clone, PartialEq)]
pub struct ShardedMatrix {
    desc: Arc<Descriptor>,
    local_rows: SparseMatrix,
}

impl ShardedMatrix {
    pub fn descriptor(&self) -> &Descriptor {
        &self.desc
    }

    pub fn local_rows(&self) -> &SparseMatrix {
        &self.local_rows
    }
}

/// Row-distributed matrix, one [`ShardedMatrix`] per shard.
#[derive(Debug, Clone, PartialEq)]
pub struct DistMatrix {
    shards: Vec<ShardedMatrix>,
}

impl DistMatrix {
    /// Extracts each shard's owned rows. The descriptors must have been built
    /// from this matrix's pattern (or a superset of it).
    pub fn from_global(
        a: &CsrMatrix,
        descs: &[Arc<Descriptor>],
        format: Format,
        hack_size: usize,
    ) -> Result<Self, PartitionError> {
        check_family(descs)?;
        let n = descs[0].n_global;
        if a.n_rows() != n || a.n_cols() != n {
            return Err(PartitionError::AdjacencyShape {
                rows: a.n_rows(),
                cols: a.n_cols(),
                n,
            });
        }
        let mut shards = Vec::with_capacity(descs.len());
        for d in descs {
            let mut row_ptr = Vec::with_capacity(d.n_owned() + 1);
            let mut entries: Vec<(usize, f64)> = Vec::new();
            let mut col_idx = Vec::with_capacity(d.owned.iter().map(|&g| a.row_len(g)).sum());
            let mut values = Vec::with_capacity(col_idx.capacity());
            row_ptr.push(0);
            for &g in &d.owned {
                entries.clear();
                for (j, v) in a.row(g) {
                    let l = d.global_to_local(j).ok_or_else(|| {
                        PartitionError::FamilyMismatch(format!(
                            "row {g} references column {j} unknown to shard {}",
                            d.shard_id
                        ))
                    })?;
                    entries.push((l, v));
                }
                entries.sort_unstable_by_key(|e| e.0);
                for &(l, v) in &entries {
                    col_idx.push(l);
                    values.push(v);
                }
                row_ptr.push(col_idx.len());
            }
            let local = CsrMatrix::from_sorted_parts(d.n_owned(), d.n_local(), row_ptr, col_idx, values);
            shards.push(ShardedMatrix {
                desc: Arc::clone(d),
                local_rows: SparseMatrix::with_symmetry(local, false).convert(format, hack_size),
            });
        }
        Ok(Self { shards })
    }

    pub fn shards(&self) -> &[ShardedMatrix] {
        &self.shards
    }

    pub fn n_global(&self) -> usize {
        self.shards[0].desc.n_global
    }

    pub fn descriptors(&self) -> Vec<Arc<Descriptor>> {
        self.shards.iter().map(|s| Arc::clone(&s.desc)).collect()
    }
}

/// y = A x on the sharded system. Exchanges the halo of `x` exactly once;
/// the halo of `y` is left stale.
pub fn sharded_spmv(a: &DistMatrix, x: &mut DistVector, y: &mut DistVector) -> Result<(), PartitionError> {
    if a.shards.len() != x.shards.len() || a.shards.len() != y.shards.len() {
        return Err(PartitionError::FamilyMismatch("shard counts differ".into()));
    }
    for ((m, xs), ys) in a.shards.iter().zip(&x.shards).zip(&y.shards) {
        if *m.desc != *xs.desc || *m.desc != *ys.desc {
            return Err(PartitionError::FamilyMismatch(format!(
                "descriptor mismatch on shard {}",
                m.desc.shard_id
            )));
        }
    }
    halo_exchange(x)?;
    for ((m, xs), ys) in a.shards.iter().zip(&x.shards).zip(&mut y.shards) {
        let n = m.desc.n_owned();
        m.local_rows
            .spmv(1.0, &xs.values, 0.0, &mut ys.values[..n])
            .map_err(|e| PartitionError::FamilyMismatch(e.to_string()))?;
        ys.halo_fresh = false;
    }
    Ok(())
}

impl KrylovVector for DistVector {
    fn zeros_like(&self) -> Self {
        Self {
            shards: self
                .shards
                .iter()
                .map(|s| ShardedVector::zeros(Arc::clone(&s.desc)))
                .collect(),
            exchanges: 0,
        }
    }

    fn axpy(&mut self, alpha: f64, x: &Self) {
        debug_assert!(self.conforms(x));
        for (ys, xs) in self.shards.iter_mut().zip(&x.shards) {
            let n = ys.desc.n_owned();
            for (y, x) in ys.values[..n].iter_mut().zip(&xs.values[..n]) {
                *y += alpha * x;
            }
            ys.halo_fresh = false;
        }
    }

    fn xpay(&mut self, x: &Self, beta: f64) {
        debug_assert!(self.conforms(x));
        for (ys, xs) in self.shards.iter_mut().zip(&x.shards) {
            let n = ys.desc.n_owned();
            for (y, x) in ys.values[..n].iter_mut().zip(&xs.values[..n]) {
                *y = x + beta * *y;
            }
            ys.halo_fresh = false;
        }
    }

    fn assign(&mut self, x: &Self) {
        debug_assert!(self.conforms(x));
        for (ys, xs) in self.shards.iter_mut().zip(&x.shards) {
            ys.values.copy_from_slice(&xs.values);
            ys.halo_fresh = xs.halo_fresh;
        }
    }

    fn set_zero(&mut self) {
        for s in &mut self.shards {
            s.values.fill(0.0);
            s.halo_fresh = true;
        }
    }

    fn fused_dots(pairs: &[(&Self, &Self)]) -> Vec<f64> {
        let Some((first, _)) = pairs.first() else {
            return Vec::new();
        };
        let mut totals = vec![0.0; pairs.len()];
        for s in 0..first.shards.len() {
            let n = first.shards[s].desc.n_owned();
            for (t, (a, b)) in totals.iter_mut().zip(pairs) {
                *t += crate::krylov::dot(&a.shards[s].values[..n], &b.shards[s].values[..n]);
            }
        }
        totals
    }
}

impl LinearOperator<DistVector> for DistMatrix {
    fn apply(&self, x: &mut DistVector, y: &mut DistVector) -> Result<(), SolveError> {
        Ok(sharded_spmv(self, x, y)?)
    }
}

/// Applies a global preconditioner to a sharded residual by gathering it,
/// preconditioning, and scattering the owned parts back.
#[derive(Debug, Clone)]
pub struct GatheredPreconditioner<P> {
    inner: P,
}

impl<P> GatheredPreconditioner<P> {
    pub fn new(inner: P) -> Self {
        Self { inner }
    }

    pub fn inner(&self) -> &P {
        &self.inner
    }
}

impl<P: Preconditioner<Vec<f64>>> Preconditioner<DistVector> for GatheredPreconditioner<P> {
    fn apply(&self, r: &DistVector, z: &mut DistVector) -> Result<(), SolveError> {
        let rg = r.gather();
        let mut zg = vec![0.0; rg.len()];
        self.inner.apply(&rg, &mut zg)?;
        z.set_global(&zg)?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::amg::test_util::path_laplacian;
    use crate::sparse::CooBuilder;

    fn arcs(descs: Vec<Descriptor>) -> Vec<Arc<Descriptor>> {
        descs.into_iter().map(Arc::new).collect()
    }

    #[test]
    fn block_partition_of_ten() {
        let d = build_descriptor(10, 2, &PartitionScheme::Block, &path_laplacian(10)).unwrap();
        assert_eq!(d[0].owned_globals(), &[0, 1, 2, 3, 4]);
        assert_eq!(d[1].owned_globals(), &[5, 6, 7, 8, 9]);
        assert_eq!(d[0].halo_globals(), &[5]);
        assert_eq!(d[1].halo_globals(), &[4]);
        assert_eq!(d[0].neighbour_sends(), &[(1, vec![4])]);
        assert_eq!(d[1].neighbour_sends(), &[(0, vec![0])]);
        assert_eq!(d[0].neighbour_recvs(), &[(1, vec![5])]);
    }

    #[test]
    fn uneven_blocks() {
        let d = build_descriptor(7, 3, &PartitionScheme::Block, &path_laplacian(7)).unwrap();
        let sizes: Vec<_> = d.iter().map(Descriptor::n_owned).collect();
        assert_eq!(sizes, vec![3, 2, 2]);
    }

    #[test]
    fn single_shard_is_identity() {
        let d = build_descriptor(6, 1, &PartitionScheme::Block, &path_laplacian(6)).unwrap();
        assert!(d[0].halo_globals().is_empty());
        for g in 0..6 {
            assert_eq!(d[0].global_to_local(g), Some(g));
        }
    }

    #[test]
    fn local_global_roundtrip_and_unknowns() {
        let d = build_descriptor(10, 3, &PartitionScheme::Block, &path_laplacian(10)).unwrap();
        for desc in &d {
            for l in 0..desc.n_local() {
                let g = desc.local_to_global(l).unwrap();
                assert_eq!(desc.global_to_local(g), Some(l));
            }
            assert_eq!(desc.local_to_global(desc.n_local()), None);
        }
        assert_eq!(d[0].global_to_local(9), None);
    }

    /// 4×2 grid (x fastest), 5-point couplings, left half on shard 0.
    fn mesh() -> (CsrMatrix, PartitionScheme) {
        let mut b = CooBuilder::new(8, 8);
        for y in 0..2 {
            for x in 0..4 {
                let i = y * 4 + x;
                b.push(i, i, 4.0);
                if x + 1 < 4 {
                    b.push(i, i + 1, -1.0);
                    b.push(i + 1, i, -1.0);
                }
                if y == 0 {
                    b.push(i, i + 4, -1.0);
                    b.push(i + 4, i, -1.0);
                }
            }
        }
        let scheme = PartitionScheme::Explicit(vec![vec![0, 1, 4, 5], vec![2, 3, 6, 7]]);
        (b.assemble().unwrap(), scheme)
    }

    #[test]
    fn interface_nodes_are_halo_after_owned() {
        let (a, scheme) = mesh();
        let d = build_descriptor(8, 2, &scheme, &a).unwrap();
        assert_eq!(d[0].halo_globals(), &[2, 6]);
        assert_eq!(d[1].halo_globals(), &[1, 5]);
        for g in [2, 6] {
            assert!(d[0].global_to_local(g).unwrap() >= d[0].n_owned());
        }
        // owner 1 sends its locals for globals 2 and 6
        assert_eq!(d[1].neighbour_sends(), &[(0, vec![0, 2])]);
    }

    #[test]
    fn bad_partitions() {
        let a = path_laplacian(4);
        let overlap = PartitionScheme::Explicit(vec![vec![0, 1, 2], vec![2, 3]]);
        assert_eq!(
            build_descriptor(4, 2, &overlap, &a),
            Err(PartitionError::Overlap { index: 2 })
        );
        let gap = PartitionScheme::Explicit(vec![vec![0, 1], vec![3]]);
        assert_eq!(
            build_descriptor(4, 2, &gap, &a),
            Err(PartitionError::Uncovered { index: 2 })
        );
        assert_eq!(
            build_descriptor(4, 0, &PartitionScheme::Block, &a),
            Err(PartitionError::NoShards)
        );
    }

    #[test]
    fn exchange_copies_owner_values() {
        let descs = arcs(build_descriptor(10, 2, &PartitionScheme::Block, &path_laplacian(10)).unwrap());
        let mut v = DistVector::zeros(&descs).unwrap();
        v.shard_mut(1).owned_mut()[0] = 3.25;
        assert!(!v.shard(1).halo_fresh());
        halo_exchange(&mut v).unwrap();
        assert_eq!(v.shard(0).halo(), &[3.25]);
        let snapshot = v.clone();
        halo_exchange(&mut v).unwrap();
        assert_eq!(v.shards(), snapshot.shards());
        assert_eq!(v.exchange_count(), 2);
    }

    #[test]
    fn spmv_matches_global_and_ignores_poison() {
        let a = path_laplacian(10);
        let x: Vec<f64> = (0..10).map(f64::from).collect();
        let want = a.mul_vec(&x);
        for s in 1..=4 {
            let descs = arcs(build_descriptor(10, s, &PartitionScheme::Block, &a).unwrap());
            let am = DistMatrix::from_global(&a, &descs, Format::Csr, 32).unwrap();
            let mut xv = DistVector::scatter(&descs, &x).unwrap();
            for sh in xv.shards_mut() {
                sh.poison_halo();
            }
            let mut y = DistVector::zeros(&descs).unwrap();
            sharded_spmv(&am, &mut xv, &mut y).unwrap();
            assert_eq!(xv.exchange_count(), 1);
            assert_eq!(y.gather(), want);
        }
    }

    #[test]
    fn reductions_sum_in_shard_order() {
        let a = path_laplacian(9);
        let descs = arcs(build_descriptor(9, 3, &PartitionScheme::Block, &a).unwrap());
        let x: Vec<f64> = (0..9).map(|i| 0.1 * i as f64).collect();
        let v = DistVector::scatter(&descs, &x).unwrap();
        let partial = |r: std::ops::Range<usize>| x[r].iter().map(|v| v * v).sum::<f64>();
        let want = (0.0 + partial(0..3)) + partial(3..6) + partial(6..9);
        assert_eq!(v.dot(&v), want);
    }

    #[test]
    fn mismatched_family_is_rejected() {
        let a = path_laplacian(10);
        let two = arcs(build_descriptor(10, 2, &PartitionScheme::Block, &a).unwrap());
        let three = arcs(build_descriptor(10, 3, &PartitionScheme::Block, &a).unwrap());
        let am = DistMatrix::from_global(&a, &two, Format::Csr, 32).unwrap();
        let mut x = DistVector::zeros(&three).unwrap();
        let mut y = DistVector::zeros(&two).unwrap();
        assert!(matches!(
            sharded_spmv(&am, &mut x, &mut y),
            Err(PartitionError::FamilyMismatch(_))
        ));
        let swapped = vec![Arc::clone(&two[1]), Arc::clone(&two[0])];
        assert!(DistVector::zeros(&swapped).is_err());
    }
}
