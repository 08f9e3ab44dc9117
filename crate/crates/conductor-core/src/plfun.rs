//! Piecewise-linear Q-valued functions on a closed rational interval.
//!
//! A `PLFun` is stored as its breakpoints and values, so it is continuous by
//! construction; evaluation is exact affine interpolation. Canonical form
//! never keeps a breakpoint where the slope does not change.

use serde::{Deserialize, Serialize};

use crate::error::{CoreError, CoreResult};
use crate::rat::Rat;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PLFun {
    /// Closed domain [a, b]; a <= b.
    pub domain: (Rat, Rat),
    /// Strictly increasing; the first breakpoint is a and the last is b.
    pub breakpoints: Vec<Rat>,
    /// Value at each breakpoint.
    pub values: Vec<Rat>,
}

impl PLFun {
    /// Builds from raw breakpoint/value lists and canonicalizes.
    pub fn new(breakpoints: Vec<Rat>, values: Vec<Rat>) -> CoreResult<Self> {
        if breakpoints.is_empty() || breakpoints.len() != values.len() {
            return Err(CoreError::Domain("breakpoint/value length mismatch".into()));
        }
        for w in breakpoints.windows(2) {
            if w[0] >= w[1] {
                return Err(CoreError::Domain("breakpoints not strictly increasing".into()));
            }
        }
        let domain = (
            breakpoints.first().unwrap().clone(),
            breakpoints.last().unwrap().clone(),
        );
        Ok(PLFun {
            domain,
            breakpoints,
            values,
        }
        .canonical())
    }

    pub fn constant(a: Rat, b: Rat, value: Rat) -> Self {
        if a == b {
            return PLFun {
                domain: (a.clone(), b),
                breakpoints: vec![a],
                values: vec![value],
            };
        }
        PLFun {
            domain: (a.clone(), b.clone()),
            breakpoints: vec![a, b],
            values: vec![value.clone(), value],
        }
    }

    /// The affine function `slope * t + offset` restricted to [a, b].
    pub fn affine(a: Rat, b: Rat, slope: Rat, offset: Rat) -> Self {
        let va = &(&slope * &a) + &offset;
        if a == b {
            return PLFun {
                domain: (a.clone(), b),
                breakpoints: vec![a],
                values: vec![va],
            };
        }
        let vb = &(&slope * &b) + &offset;
        PLFun {
            domain: (a.clone(), b.clone()),
            breakpoints: vec![a, b],
            values: vec![va, vb],
        }
    }

    pub fn is_point(&self) -> bool {
        self.domain.0 == self.domain.1
    }

    /// Removes interior breakpoints where left and right slopes agree.
    pub fn canonical(self) -> Self {
        if self.breakpoints.len() <= 2 {
            return self;
        }
        let mut bps = vec![self.breakpoints[0].clone()];
        let mut vals = vec![self.values[0].clone()];
        for i in 1..self.breakpoints.len() - 1 {
            let sl = slope_between(
                (&self.breakpoints[i - 1], &self.values[i - 1]),
                (&self.breakpoints[i], &self.values[i]),
            );
            let sr = slope_between(
                (&self.breakpoints[i], &self.values[i]),
                (&self.breakpoints[i + 1], &self.values[i + 1]),
            );
            if sl != sr {
                bps.push(self.breakpoints[i].clone());
                vals.push(self.values[i].clone());
            }
        }
        bps.push(self.breakpoints.last().unwrap().clone());
        vals.push(self.values.last().unwrap().clone());
        PLFun {
            domain: self.domain,
            breakpoints: bps,
            values: vals,
        }
    }

    pub fn contains(&self, t: &Rat) -> bool {
        *t >= self.domain.0 && *t <= self.domain.1
    }

    pub fn eval(&self, t: &Rat) -> CoreResult<Rat> {
        if !self.contains(t) {
            return Err(CoreError::Domain(format!(
                "t = {t} outside domain [{}, {}]",
                self.domain.0, self.domain.1
            )));
        }
        let i = match self.breakpoints.binary_search_by(|b| b.cmp_val(t)) {
            Ok(i) => return Ok(self.values[i].clone()),
            Err(i) => i,
        };
        // t strictly between breakpoints[i-1] and breakpoints[i]
        let (t0, v0) = (&self.breakpoints[i - 1], &self.values[i - 1]);
        let (t1, v1) = (&self.breakpoints[i], &self.values[i]);
        let slope = slope_between((t0, v0), (t1, v1));
        Ok(v0 + &(&slope * &(t - t0)))
    }

    /// Per-segment slopes, in domain order.
    pub fn slopes(&self) -> Vec<((Rat, Rat), Rat)> {
        let mut out = Vec::new();
        for i in 0..self.breakpoints.len().saturating_sub(1) {
            let s = slope_between(
                (&self.breakpoints[i], &self.values[i]),
                (&self.breakpoints[i + 1], &self.values[i + 1]),
            );
            out.push((
                (self.breakpoints[i].clone(), self.breakpoints[i + 1].clone()),
                s,
            ));
        }
        out
    }

    /// Right derivative at t in [a, b).
    pub fn right_deriv(&self, t: &Rat) -> CoreResult<Rat> {
        if !self.contains(t) || *t >= self.domain.1 {
            return Err(CoreError::Domain(format!(
                "right derivative undefined at t = {t}"
            )));
        }
        for ((a, b), s) in self.slopes() {
            if *t >= a && *t < b {
                return Ok(s);
            }
        }
        Err(CoreError::Domain("no segment found".into()))
    }

    /// Left derivative at t in (a, b].
    pub fn left_deriv(&self, t: &Rat) -> CoreResult<Rat> {
        if !self.contains(t) || *t <= self.domain.0 {
            return Err(CoreError::Domain(format!(
                "left derivative undefined at t = {t}"
            )));
        }
        for ((a, b), s) in self.slopes() {
            if *t > a && *t <= b {
                return Ok(s);
            }
        }
        Err(CoreError::Domain("no segment found".into()))
    }

    fn assert_same_domain(&self, other: &Self) -> CoreResult<()> {
        if self.domain != other.domain {
            return Err(CoreError::Domain(format!(
                "domain mismatch: [{}, {}] vs [{}, {}]",
                self.domain.0, self.domain.1, other.domain.0, other.domain.1
            )));
        }
        Ok(())
    }

    /// Breakpoint grid shared by self and other.
    fn joint_grid(&self, other: &Self) -> Vec<Rat> {
        let mut grid: Vec<Rat> = self
            .breakpoints
            .iter()
            .chain(other.breakpoints.iter())
            .cloned()
            .collect();
        grid.sort();
        grid.dedup();
        grid
    }

    pub fn add(&self, other: &Self) -> CoreResult<Self> {
        self.assert_same_domain(other)?;
        let grid = self.joint_grid(other);
        let values = grid
            .iter()
            .map(|t| Ok(&self.eval(t)? + &other.eval(t)?))
            .collect::<CoreResult<Vec<_>>>()?;
        PLFun::new(grid, values)
    }

    pub fn scale(&self, c: &Rat) -> Self {
        PLFun {
            domain: self.domain.clone(),
            breakpoints: self.breakpoints.clone(),
            values: self.values.iter().map(|v| c * v).collect(),
        }
        .canonical()
    }

    pub fn add_const(&self, c: &Rat) -> Self {
        PLFun {
            domain: self.domain.clone(),
            breakpoints: self.breakpoints.clone(),
            values: self.values.iter().map(|v| v + c).collect(),
        }
    }

    pub fn neg(&self) -> Self {
        self.scale(&-Rat::one())
    }

    fn min_or_max(&self, other: &Self, take_min: bool) -> CoreResult<Self> {
        self.assert_same_domain(other)?;
        let grid = self.joint_grid(other);
        // insert exact crossing points between consecutive grid nodes
        let mut bps: Vec<Rat> = Vec::new();
        let mut vals: Vec<Rat> = Vec::new();
        let pick = |x: Rat, y: Rat| if take_min { x.min(y) } else { x.max(y) };
        for i in 0..grid.len() {
            let t = &grid[i];
            if i > 0 {
                let t0 = &grid[i - 1];
                let f0 = self.eval(t0)?;
                let g0 = other.eval(t0)?;
                let f1 = self.eval(t)?;
                let g1 = other.eval(t)?;
                let d0 = &f0 - &g0;
                let d1 = &f1 - &g1;
                if d0.is_negative() != d1.is_negative() && !d0.is_zero() && !d1.is_zero() {
                    // crossing strictly inside: t* = t0 + (t - t0) * d0 / (d0 - d1)
                    let tstar = t0 + &(&(t - t0) * &(&d0 / &(&d0 - &d1)));
                    if tstar > *t0 && tstar < *t {
                        let v = self.eval(&tstar)?;
                        bps.push(tstar);
                        vals.push(v);
                    }
                }
            }
            bps.push(t.clone());
            vals.push(pick(self.eval(t)?, other.eval(t)?));
        }
        PLFun::new(bps, vals)
    }

    pub fn min(&self, other: &Self) -> CoreResult<Self> {
        self.min_or_max(other, true)
    }

    pub fn max(&self, other: &Self) -> CoreResult<Self> {
        self.min_or_max(other, false)
    }

    pub fn is_convex(&self) -> bool {
        let slopes = self.slopes();
        slopes.windows(2).all(|w| w[0].1 <= w[1].1)
    }

    pub fn has_integer_slopes(&self) -> bool {
        self.slopes().iter().all(|(_, s)| s.is_integer())
    }

    /// Restriction to a closed subinterval.
    pub fn restrict(&self, a: &Rat, b: &Rat) -> CoreResult<Self> {
        if !(self.contains(a) && self.contains(b) && a <= b) {
            return Err(CoreError::Domain(format!("bad restriction [{a}, {b}]")));
        }
        let mut bps = vec![a.clone()];
        let mut vals = vec![self.eval(a)?];
        for (t, v) in self.breakpoints.iter().zip(&self.values) {
            if t > a && t < b {
                bps.push(t.clone());
                vals.push(v.clone());
            }
        }
        if b > a {
            bps.push(b.clone());
            vals.push(self.eval(b)?);
        }
        Ok(PLFun {
            domain: (a.clone(), b.clone()),
            breakpoints: bps,
            values: vals,
        }
        .canonical())
    }

    /// Glues PL pieces over adjacent intervals; endpoint values must agree
    /// exactly where pieces meet (this is the continuity check, not an
    /// assumption).
    pub fn concat(pieces: &[PLFun]) -> CoreResult<Self> {
        if pieces.is_empty() {
            return Err(CoreError::Domain("no pieces to glue".into()));
        }
        let mut bps = Vec::new();
        let mut vals = Vec::new();
        for (k, piece) in pieces.iter().enumerate() {
            if k == 0 {
                bps.extend(piece.breakpoints.iter().cloned());
                vals.extend(piece.values.iter().cloned());
                continue;
            }
            if piece.domain.0 != *bps.last().unwrap() {
                return Err(CoreError::Domain("pieces not adjacent".into()));
            }
            if piece.values[0] != *vals.last().unwrap() {
                return Err(CoreError::ModelError(format!(
                    "discontinuity at t = {}: {} vs {}",
                    piece.domain.0,
                    vals.last().unwrap(),
                    piece.values[0]
                )));
            }
            bps.extend(piece.breakpoints[1..].iter().cloned());
            vals.extend(piece.values[1..].iter().cloned());
        }
        PLFun::new(bps, vals)
    }

    /// Lower envelope of a family of affine functions (slope, offset) over
    /// [a, b]: the pointwise minimum of `slope * t + offset`.
    pub fn lower_envelope(a: &Rat, b: &Rat, lines: &[(Rat, Rat)]) -> CoreResult<Self> {
        if lines.is_empty() {
            return Err(CoreError::Domain("empty line family".into()));
        }
        let eval_line = |l: &(Rat, Rat), t: &Rat| &(&l.0 * t) + &l.1;
        if a == b {
            let v = lines.iter().map(|l| eval_line(l, a)).min().unwrap();
            return Ok(PLFun::constant(a.clone(), b.clone(), v));
        }
        // march from a to b, always standing on the current minimal line
        let mut bps = vec![a.clone()];
        let mut vals = Vec::new();
        // current = line minimal at a, tie-broken by smallest slope so it
        // stays minimal just right of a
        let mut current = lines
            .iter()
            .min_by(|x, y| {
                eval_line(x, a)
                    .cmp_val(&eval_line(y, a))
                    .then(x.0.cmp_val(&y.0))
            })
            .unwrap()
            .clone();
        vals.push(eval_line(&current, a));
        let mut t_cur = a.clone();
        loop {
            // earliest strictly-later crossing where a smaller-slope line dips below
            let mut best: Option<(Rat, (Rat, Rat))> = None;
            for l in lines {
                if l.0 >= current.0 {
                    continue;
                }
                // crossing of current and l
                let tx = &(&l.1 - &current.1) / &(&current.0 - &l.0);
                if tx <= t_cur || tx > *b {
                    continue;
                }
                match &mut best {
                    None => best = Some((tx, l.clone())),
                    Some((bt, bl)) => {
                        if tx < *bt || (tx == *bt && l.0 < bl.0) {
                            best = Some((tx, l.clone()));
                        }
                    }
                }
            }
            match best {
                Some((tx, l)) => {
                    bps.push(tx.clone());
                    vals.push(eval_line(&l, &tx));
                    t_cur = tx;
                    current = l;
                }
                None => break,
            }
        }
        if *bps.last().unwrap() != *b {
            bps.push(b.clone());
            vals.push(eval_line(&current, b));
        }
        PLFun::new(bps, vals)
    }
}

pub fn slope_between(p0: (&Rat, &Rat), p1: (&Rat, &Rat)) -> Rat {
    &(p1.1 - p0.1) / &(p1.0 - p0.0)
}
