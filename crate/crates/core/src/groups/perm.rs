use std::fmt;

/// A permutation of `{1, 2, 3}`, stored as the images of `0, 1, 2`.
///
/// Products compose left to right: `a.then(b)` applies `a` first, so
/// `(12)·(13) = (123)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Perm3(pub(crate) [u8; 3]);

impl Perm3 {
    pub const IDENTITY: Perm3 = Perm3([0, 1, 2]);

    pub fn from_images(images: [u8; 3]) -> Option<Self> {
        let mut seen = [false; 3];
        for &i in &images {
            if i > 2 || seen[i as usize] {
                return None;
            }
            seen[i as usize] = true;
        }
        Some(Perm3(images))
    }

    /// Transposition of the 1-based points `i` and `j`.
    pub fn transposition(i: u8, j: u8) -> Self {
        let mut images = [0, 1, 2];
        images.swap((i - 1) as usize, (j - 1) as usize);
        Perm3(images)
    }

    pub fn images(&self) -> [u8; 3] {
        self.0
    }

    #[inline]
    pub fn apply(&self, point: u8) -> u8 {
        self.0[point as usize]
    }

    #[inline]
    pub fn then(&self, other: &Perm3) -> Perm3 {
        Perm3([
            other.0[self.0[0] as usize],
            other.0[self.0[1] as usize],
            other.0[self.0[2] as usize],
        ])
    }

    pub fn inverse(&self) -> Perm3 {
        let mut inv = [0u8; 3];
        for (i, &img) in self.0.iter().enumerate() {
            inv[img as usize] = i as u8;
        }
        Perm3(inv)
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::IDENTITY
    }

    /// Number of transpositions in a shortest expression (all three are
    /// generators): 0 for the identity, 1 for a transposition, 2 for a 3-cycle.
    pub fn transposition_length(&self) -> u32 {
        let fixed = (0..3).filter(|&i| self.0[i] == i as u8).count();
        match fixed {
            3 => 0,
            1 => 1,
            _ => 2,
        }
    }

    pub fn all() -> [Perm3; 6] {
        [
            Perm3([0, 1, 2]),
            Perm3([1, 0, 2]),
            Perm3([2, 1, 0]),
            Perm3([0, 2, 1]),
            Perm3([1, 2, 0]),
            Perm3([2, 0, 1]),
        ]
    }

    /// Parses `Id`, `e`, `()` or cycle notation such as `(12)`, `(132)`, `(12)(3)`.
    pub fn parse(text: &str) -> Option<Self> {
        let t: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        if t.eq_ignore_ascii_case("id") || t == "e" || t == "()" || t.is_empty() {
            return Some(Self::IDENTITY);
        }
        let mut images = [0u8, 1, 2];
        let mut rest = t.as_str();
        while !rest.is_empty() {
            let inner = rest.strip_prefix('(')?;
            let close = inner.find(')')?;
            let cycle = &inner[..close];
            rest = &inner[close + 1..];
            let points: Vec<u8> = cycle
                .chars()
                .map(|c| c.to_digit(10).map(|d| d as u8))
                .collect::<Option<Vec<_>>>()?;
            if points.iter().any(|&p| !(1..=3).contains(&p)) {
                return None;
            }
            // Cycles are applied left to right as well.
            let mut step = [0u8, 1, 2];
            for k in 0..points.len() {
                let from = points[k] - 1;
                let to = points[(k + 1) % points.len()] - 1;
                step[from as usize] = to;
            }
            let step = Perm3::from_images(step)?;
            images = Perm3(images).then(&step).0;
        }
        Perm3::from_images(images)
    }
}

impl fmt::Display for Perm3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_identity() {
            return f.write_str("Id");
        }
        let mut seen = [false; 3];
        for start in 0..3u8 {
            if seen[start as usize] || self.apply(start) == start {
                continue;
            }
            f.write_str("(")?;
            let mut p = start;
            while !seen[p as usize] {
                seen[p as usize] = true;
                write!(f, "{}", p + 1)?;
                p = self.apply(p);
            }
            f.write_str(")")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Row-vector permutation matrices: `M[i][σ(i)] = 1`, so left-to-right
    /// composition corresponds to the ordinary matrix product `M_σ · M_τ`.
    fn matrix(p: &Perm3) -> [[u8; 3]; 3] {
        let mut m = [[0u8; 3]; 3];
        for i in 0..3 {
            m[i][p.apply(i as u8) as usize] = 1;
        }
        m
    }

    fn matmul(a: &[[u8; 3]; 3], b: &[[u8; 3]; 3]) -> [[u8; 3]; 3] {
        let mut c = [[0u8; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                c[i][j] = (0..3).map(|k| a[i][k] * b[k][j]).sum();
            }
        }
        c
    }

    #[test]
    fn composition_matches_matrix_table() {
        for a in Perm3::all() {
            for b in Perm3::all() {
                assert_eq!(matrix(&a.then(&b)), matmul(&matrix(&a), &matrix(&b)));
            }
        }
    }

    #[test]
    fn transposition_product_is_three_cycle() {
        let p12 = Perm3::parse("(12)").unwrap();
        let p13 = Perm3::parse("(13)").unwrap();
        let prod = p12.then(&p13);
        assert_eq!(prod, Perm3::parse("(123)").unwrap());
        assert_eq!(prod.to_string(), "(123)");
        // 1 -> 2 -> 2, 2 -> 1 -> 3, 3 -> 3 -> 1
        assert_eq!(prod.images(), [1, 2, 0]);
    }

    #[test]
    fn parse_display_roundtrip() {
        for p in Perm3::all() {
            assert_eq!(Perm3::parse(&p.to_string()), Some(p));
            assert!(p.then(&p.inverse()).is_identity());
        }
        assert_eq!(Perm3::parse("(12)(3)"), Some(Perm3::transposition(1, 2)));
        assert_eq!(Perm3::parse("(14)"), None);
    }
}
