/// Row-major strides for a list of subsystem dimensions.
pub(crate) struct Layout {
    dims: Vec<usize>,
    strides: Vec<usize>,
}

impl Layout {
    pub fn new(dims: &[usize]) -> Self {
        let mut strides = vec![1; dims.len()];
        for i in (0..dims.len().saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * dims[i + 1];
        }
        Layout { dims: dims.to_vec(), strides }
    }

    /// Flat offsets of every multi-index over `subset`, enumerated row-major
    /// in the order the subset is listed.
    pub fn offsets(&self, subset: &[usize]) -> Vec<usize> {
        let mut out = vec![0usize];
        for &s in subset {
            let mut next = Vec::with_capacity(out.len() * self.dims[s]);
            for &o in &out {
                for d in 0..self.dims[s] {
                    next.push(o + d * self.strides[s]);
                }
            }
            out = next;
        }
        out
    }
}
