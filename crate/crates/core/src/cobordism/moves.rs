//! Diagram edits for Morse moves and Reidemeister I/II.
//!
//! Edge ids survive a move wherever the strand survives: a subdivided edge
//! keeps its id on the first segment, new segments get fresh ids above the
//! current maximum, and a removed crossing hands its outgoing strand to the
//! incoming edge id. New crossings are appended. Faces are carried across by
//! the corners of the crossings the move leaves alone.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::diagram::{Crossing, EdgeId, FaceId, FreeLoop, LinkDiagram, Sign, Slot};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Side {
    Left,
    Right,
}

/// A face named in a move: a face id, the outer region, or the inside of a
/// free loop.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FaceRef {
    Outer,
    Face(FaceId),
    Inside,
}

impl fmt::Display for FaceRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FaceRef::Outer => f.write_str("outer"),
            FaceRef::Face(id) => write!(f, "{id}"),
            FaceRef::Inside => f.write_str("inside"),
        }
    }
}

/// Parallel strands (same direction across the face) or antiparallel ones.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum R2Kind {
    Parallel,
    Antiparallel,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Move {
    /// A new crossingless circle in a face.
    Birth { face: FaceRef, clockwise: bool },
    /// Removal of a free loop.
    Death { edge: EdgeId },
    /// Oriented band between two edges across a common face.
    Saddle { edges: [EdgeId; 2], face: Option<FaceRef> },
    /// A kink on `edge`, with its lobe on `side`.
    R1 { edge: EdgeId, positive: bool, side: Side },
    /// A finger of `over` pushed across a face and over `under`.
    R2 {
        over: EdgeId,
        under: EdgeId,
        face: Option<FaceRef>,
        kind: Option<R2Kind>,
    },
    /// Removal of a kink at a crossing, optionally naming the kink edge.
    UnR1 { crossing: usize, kink: Option<EdgeId> },
    /// Removal of a bigon between two crossings.
    UnR2 { crossings: [usize; 2] },
    R3 { text: String },
}

impl Move {
    /// Euler characteristic of the elementary cobordism.
    pub fn euler(&self) -> i64 {
        match self {
            Move::Birth { .. } | Move::Death { .. } => 1,
            Move::Saddle { .. } => -1,
            _ => 0,
        }
    }

    pub fn is_morse(&self) -> bool {
        matches!(self, Move::Birth { .. } | Move::Death { .. } | Move::Saddle { .. })
    }

    /// Parses one line of a movie.
    pub fn parse(line: &str) -> Result<Move> {
        let words: Vec<&str> = line.split_whitespace().collect();
        let bad = || Error::Parse(format!("cannot read move `{line}`"));
        let num = |s: &str| -> Result<usize> {
            s.parse().map_err(|_| Error::Parse(format!("expected a number, got `{s}` in `{line}`")))
        };
        let face = |s: &str| -> Result<FaceRef> {
            match s {
                "outer" => Ok(FaceRef::Outer),
                "inside" => Ok(FaceRef::Inside),
                _ => num(s).map(FaceRef::Face),
            }
        };
        let Some(&head) = words.first() else {
            return Err(bad());
        };
        let rest = &words[1..];
        let mv = match head {
            "birth" => {
                let mut it = rest.iter().copied().peekable();
                if it.peek() == Some(&"in") {
                    it.next();
                }
                let f = match it.next() {
                    Some(w) => face(w)?,
                    None => FaceRef::Outer,
                };
                if f == FaceRef::Inside {
                    return Err(Error::Parse("a birth cannot be placed inside a loop".into()));
                }
                let clockwise = match it.next() {
                    None | Some("ccw") => false,
                    Some("cw") => true,
                    Some(_) => return Err(bad()),
                };
                if it.next().is_some() {
                    return Err(bad());
                }
                Move::Birth { face: f, clockwise }
            }
            "death" => match rest {
                [e] => Move::Death { edge: num(e)? },
                _ => return Err(bad()),
            },
            "saddle" => match rest {
                [a, b] => Move::Saddle {
                    edges: [num(a)?, num(b)?],
                    face: None,
                },
                [a, b, f] => Move::Saddle {
                    edges: [num(a)?, num(b)?],
                    face: Some(face(f)?),
                },
                _ => return Err(bad()),
            },
            "r1+" | "r1-" => {
                let positive = head == "r1+";
                let (edge, side) = match rest {
                    [e] => (num(e)?, Side::Left),
                    [e, "left"] => (num(e)?, Side::Left),
                    [e, "right"] => (num(e)?, Side::Right),
                    _ => return Err(bad()),
                };
                Move::R1 { edge, positive, side }
            }
            "r2" | "r2a" | "r2b" => {
                let kind = match head {
                    "r2a" => Some(R2Kind::Parallel),
                    "r2b" => Some(R2Kind::Antiparallel),
                    _ => None,
                };
                match rest {
                    [a, b] => Move::R2 {
                        over: num(a)?,
                        under: num(b)?,
                        face: None,
                        kind,
                    },
                    [a, b, f] => Move::R2 {
                        over: num(a)?,
                        under: num(b)?,
                        face: Some(face(f)?),
                        kind,
                    },
                    _ => return Err(bad()),
                }
            }
            "unr1" => match rest {
                [c] => Move::UnR1 {
                    crossing: num(c)?,
                    kink: None,
                },
                [c, e] => Move::UnR1 {
                    crossing: num(c)?,
                    kink: Some(num(e)?),
                },
                _ => return Err(bad()),
            },
            "unr2" => match rest {
                [a, b] => Move::UnR2 {
                    crossings: [num(a)?, num(b)?],
                },
                _ => return Err(bad()),
            },
            "r3" | "unr3" => Move::R3 { text: line.trim().to_string() },
            _ => return Err(Error::Parse(format!("unknown move `{head}`"))),
        };
        Ok(mv)
    }
}

impl fmt::Display for Move {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Move::Birth { face, clockwise } => {
                write!(f, "birth in {face}{}", if *clockwise { " cw" } else { "" })
            }
            Move::Death { edge } => write!(f, "death {edge}"),
            Move::Saddle { edges, face } => {
                write!(f, "saddle {} {}", edges[0], edges[1])?;
                if let Some(x) = face {
                    write!(f, " {x}")?;
                }
                Ok(())
            }
            Move::R1 { edge, positive, side } => write!(
                f,
                "r1{} {edge} {}",
                if *positive { "+" } else { "-" },
                if *side == Side::Left { "left" } else { "right" }
            ),
            Move::R2 { over, under, face, kind } => {
                let name = match kind {
                    None => "r2",
                    Some(R2Kind::Parallel) => "r2a",
                    Some(R2Kind::Antiparallel) => "r2b",
                };
                write!(f, "{name} {over} {under}")?;
                if let Some(x) = face {
                    write!(f, " {x}")?;
                }
                Ok(())
            }
            Move::UnR1 { crossing, kink } => {
                write!(f, "unr1 {crossing}")?;
                if let Some(e) = kink {
                    write!(f, " {e}")?;
                }
                Ok(())
            }
            Move::UnR2 { crossings } => write!(f, "unr2 {} {}", crossings[0], crossings[1]),
            Move::R3 { text } => f.write_str(text),
        }
    }
}

/// What the chain maps need to know about a move.
#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) enum Site {
    Birth { edge: EdgeId },
    Death { edge: EdgeId },
    /// The band ends in the diagram before the move; a free loop among them is absorbed.
    Saddle { edges: [EdgeId; 2] },
    /// `crossing` and `kink` live in the kinked diagram, `strand` in both.
    Kink {
        crossing: usize,
        kink: EdgeId,
        strand: EdgeId,
        added: bool,
    },
    /// Crossing positions (ascending) and bigon edges in the diagram with the bigon.
    Bigon {
        crossings: [usize; 2],
        bigon: [EdgeId; 2],
        added: bool,
    },
}

/// Region of the plane on one side of an edge.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Region {
    Outer,
    Face(FaceId),
    Inside(EdgeId),
}

fn face_region(d: &LinkDiagram, f: FaceId) -> Region {
    if d.is_outer_face(f) {
        Region::Outer
    } else {
        Region::Face(f)
    }
}

fn loop_region(d: &LinkDiagram, l: &FreeLoop) -> Region {
    match d.loop_face(l) {
        None => Region::Outer,
        Some(f) => Region::Face(f),
    }
}

fn side_region(d: &LinkDiagram, e: EdgeId, side: Side) -> Result<Region> {
    if let Some(l) = d.free_loop(e) {
        let exterior_side = if l.exterior_on_left { Side::Left } else { Side::Right };
        return Ok(if side == exterior_side {
            loop_region(d, l)
        } else {
            Region::Inside(e)
        });
    }
    let f = match side {
        Side::Left => d.left_face(e),
        Side::Right => d.right_face(e),
    }
    .ok_or_else(|| Error::Move(format!("edge {e} does not exist")))?;
    Ok(face_region(d, f))
}

fn region_matches(d: &LinkDiagram, r: Region, f: FaceRef) -> bool {
    match (r, f) {
        (Region::Outer, FaceRef::Outer) => true,
        (Region::Inside(_), FaceRef::Inside) => true,
        (Region::Face(a), FaceRef::Face(b)) => a == b,
        (Region::Outer, FaceRef::Face(b)) => b < d.n_faces() && d.is_outer_face(b),
        _ => false,
    }
}

fn require_edge(d: &LinkDiagram, e: EdgeId) -> Result<()> {
    if d.has_edge(e) {
        Ok(())
    } else {
        Err(Error::Move(format!("edge {e} does not exist")))
    }
}

/// Side pairs `(s1, s2)` along which `e1` and `e2` face a common region.
fn common_sides(
    d: &LinkDiagram,
    e1: EdgeId,
    e2: EdgeId,
    face: Option<FaceRef>,
    same_side_only: bool,
) -> Result<Vec<(Side, Side)>> {
    let mut out = Vec::new();
    for s1 in [Side::Left, Side::Right] {
        for s2 in [Side::Left, Side::Right] {
            if same_side_only && s1 != s2 {
                continue;
            }
            let (r1, r2) = (side_region(d, e1, s1)?, side_region(d, e2, s2)?);
            if r1 != r2 {
                continue;
            }
            if let Some(f) = face {
                if !region_matches(d, r1, f) {
                    continue;
                }
            }
            out.push((s1, s2));
        }
    }
    Ok(out)
}

/// Where a loop of the new diagram sits.
#[derive(Clone, Copy, Debug)]
enum Place {
    /// A region of the old diagram, carried across by corners.
    Old(Region),
    /// Already a face id of the new diagram (`None` = outer).
    New(Option<FaceId>),
}

/// Crossings and loops of the diagram after a move, before faces are fixed.
struct Rebuild<'a> {
    old: &'a LinkDiagram,
    crossings: Vec<Crossing>,
    loops: Vec<(EdgeId, bool, Place)>,
    /// new index of every old crossing, if it survives
    crossing_map: Vec<Option<usize>>,
    /// outer face for pieces with no surviving old corner: the face on this side of this edge
    fresh_outer: Vec<(EdgeId, Side)>,
}

impl<'a> Rebuild<'a> {
    fn keep_all(old: &'a LinkDiagram) -> Self {
        Rebuild {
            old,
            crossings: old.crossings().to_vec(),
            loops: old
                .loops()
                .iter()
                .map(|l| (l.edge, l.exterior_on_left, Place::Old(loop_region(old, l))))
                .collect(),
            crossing_map: (0..old.n_crossings()).map(Some).collect(),
            fresh_outer: Vec::new(),
        }
    }

    fn set_slot(&mut self, s: Slot, e: EdgeId) {
        self.crossings[s.crossing].edges[s.pos as usize] = e;
    }

    fn remove_loop(&mut self, e: EdgeId) {
        self.loops.retain(|l| l.0 != e);
    }

    fn finish(self) -> Result<LinkDiagram> {
        let old = self.old;
        let bare: Vec<FreeLoop> = self
            .loops
            .iter()
            .map(|&(edge, cw, _)| FreeLoop {
                edge,
                face: None,
                exterior_on_left: cw,
            })
            .collect();
        let staged = LinkDiagram::with_outer_faces(self.crossings.clone(), bare, Vec::new())?;
        // images of old faces through surviving corners
        let mut images: BTreeMap<FaceId, BTreeSet<FaceId>> = BTreeMap::new();
        let mut hints: BTreeMap<usize, FaceId> = BTreeMap::new();
        for (i, m) in self.crossing_map.iter().enumerate() {
            let Some(j) = *m else { continue };
            for q in 0..4 {
                let f_old = old.corner_face(4 * i + q);
                let f_new = staged.corner_face(4 * j + q);
                images.entry(f_old).or_default().insert(f_new);
                if old.is_outer_face(f_old) {
                    hints.entry(staged.piece_of(j)).or_insert(f_new);
                }
            }
        }
        for &(e, side) in &self.fresh_outer {
            let f = match side {
                Side::Left => staged.left_face(e),
                Side::Right => staged.right_face(e),
            }
            .ok_or_else(|| Error::Internal(format!("edge {e} is not a crossing edge")))?;
            let t = staged.tail(e).expect("crossing edge");
            hints.entry(staged.piece_of(t.crossing)).or_insert(f);
        }
        if hints.len() != staged.n_pieces() {
            return Err(Error::Move(
                "the move would leave part of the diagram inside a bounded face, which is not representable".into(),
            ));
        }
        let mut loops = Vec::with_capacity(self.loops.len());
        for &(edge, cw, place) in &self.loops {
            let face = match place {
                Place::New(f) => f,
                Place::Old(Region::Outer) => None,
                Place::Old(Region::Face(f)) => {
                    let img = images.get(&f).cloned().unwrap_or_default();
                    if img.len() != 1 {
                        return Err(Error::Move(format!(
                            "face {f} holding loop {edge} does not survive the move as a single face"
                        )));
                    }
                    img.into_iter().next()
                }
                Place::Old(Region::Inside(_)) => {
                    return Err(Error::Internal("a loop cannot sit inside another loop".into()))
                }
            };
            loops.push(FreeLoop {
                edge,
                face,
                exterior_on_left: cw,
            });
        }
        LinkDiagram::with_outer_faces(self.crossings, loops, hints.into_values().collect())
    }
}

/// The result of applying a move.
pub(crate) struct Applied {
    pub diagram: LinkDiagram,
    pub site: Site,
}

pub(crate) fn apply(d: &LinkDiagram, mv: &Move) -> Result<Applied> {
    match mv {
        Move::Birth { face, clockwise } => birth(d, *face, *clockwise),
        Move::Death { edge } => death(d, *edge),
        Move::Saddle { edges, face } => saddle(d, edges[0], edges[1], *face),
        Move::R1 { edge, positive, side } => r1(d, *edge, *positive, *side),
        Move::R2 { over, under, face, kind } => r2(d, *over, *under, *face, *kind),
        Move::UnR1 { crossing, kink } => unr1(d, *crossing, *kink),
        Move::UnR2 { crossings } => unr2(d, crossings[0], crossings[1]),
        Move::R3 { text } => Err(Error::Unsupported(format!(
            "`{text}`: Reidemeister III maps are not available; rewrite the movie without R3"
        ))),
    }
}

fn birth(d: &LinkDiagram, face: FaceRef, clockwise: bool) -> Result<Applied> {
    let place = match face {
        FaceRef::Outer => Region::Outer,
        FaceRef::Face(f) if d.n_crossings() == 0 && f == 0 => Region::Outer,
        FaceRef::Face(f) if f < d.n_faces() && d.n_crossings() > 0 => face_region(d, f),
        FaceRef::Face(f) => return Err(Error::Move(format!("face {f} does not exist"))),
        FaceRef::Inside => return Err(Error::Move("a birth cannot be placed inside a loop".into())),
    };
    let edge = d.max_edge() + 1;
    let mut b = Rebuild::keep_all(d);
    b.loops.push((edge, clockwise, Place::Old(place)));
    Ok(Applied {
        diagram: b.finish()?,
        site: Site::Birth { edge },
    })
}

fn death(d: &LinkDiagram, edge: EdgeId) -> Result<Applied> {
    if !d.is_loop(edge) {
        return Err(Error::Move(format!("death needs a free loop; edge {edge} is not one")));
    }
    let mut b = Rebuild::keep_all(d);
    b.remove_loop(edge);
    Ok(Applied {
        diagram: b.finish()?,
        site: Site::Death { edge },
    })
}

fn saddle(d: &LinkDiagram, e1: EdgeId, e2: EdgeId, face: Option<FaceRef>) -> Result<Applied> {
    require_edge(d, e1)?;
    require_edge(d, e2)?;
    if e1 == e2 {
        return Err(Error::Move(format!("saddle needs two different edges, got {e1} twice")));
    }
    if common_sides(d, e1, e2, face, true)?.is_empty() {
        return Err(Error::Move(format!(
            "edges {e1} and {e2} do not face a common region with compatible orientations{}",
            face.map_or(String::new(), |f| format!(" across face {f}"))
        )));
    }
    let mut b = Rebuild::keep_all(d);
    let (l1, l2) = (d.is_loop(e1), d.is_loop(e2));
    let mut splits_outer = false;
    match (l1, l2) {
        (false, false) => {
            let (h1, h2) = (d.head(e1).unwrap(), d.head(e2).unwrap());
            b.set_slot(h1, e2);
            b.set_slot(h2, e1);
            let sides = common_sides(d, e1, e2, face, true)?;
            splits_outer = sides.iter().all(|&(s, _)| side_region(d, e1, s).ok() == Some(Region::Outer));
        }
        (true, false) => b.remove_loop(e1),
        (_, true) => b.remove_loop(e2),
    }
    let pieces_before = d.n_pieces();
    let diagram = b.finish()?;
    if splits_outer && diagram.n_pieces() > pieces_before {
        return Err(Error::Move(format!(
            "a saddle of {e1} and {e2} across the outer region would nest one part inside the other"
        )));
    }
    Ok(Applied {
        diagram,
        site: Site::Saddle { edges: [e1, e2] },
    })
}

fn r1(d: &LinkDiagram, e: EdgeId, positive: bool, side: Side) -> Result<Applied> {
    require_edge(d, e)?;
    let n = d.n_crossings();
    let m = d.max_edge();
    let kink = m + 1;
    let mut b = Rebuild::keep_all(d);
    let exit = if let Some(l) = d.free_loop(e) {
        if loop_region(d, l) != Region::Outer {
            return Err(Error::Move(format!(
                "loop {e} sits in a bounded face; a kink would nest a new piece there"
            )));
        }
        let exterior = if l.exterior_on_left { Side::Left } else { Side::Right };
        b.remove_loop(e);
        b.fresh_outer.push((e, exterior));
        e
    } else {
        let exit = m + 2;
        let h = d.head(e).unwrap();
        b.set_slot(h, exit);
        exit
    };
    // ends counterclockwise from the first pass's incoming end
    let (ends, first_under) = match side {
        Side::Left => ([(e, true), (exit, false), (kink, false), (kink, true)], positive),
        Side::Right => ([(e, true), (kink, true), (kink, false), (exit, false)], !positive),
    };
    b.crossings.push(Crossing::from_ccw(ends, if first_under { 0 } else { 1 }));
    let diagram = b.finish()?;
    debug_assert_eq!(diagram.crossings()[n].sign() == Sign::Positive, positive);
    Ok(Applied {
        diagram,
        site: Site::Kink {
            crossing: n,
            kink,
            strand: e,
            added: true,
        },
    })
}

fn r2(d: &LinkDiagram, e1: EdgeId, e2: EdgeId, face: Option<FaceRef>, kind: Option<R2Kind>) -> Result<Applied> {
    require_edge(d, e1)?;
    require_edge(d, e2)?;
    let same_loop = e1 == e2;
    if same_loop && !d.is_loop(e1) {
        return Err(Error::Move(format!(
            "a finger of edge {e1} over itself is only supported on a free loop"
        )));
    }
    let mut options = common_sides(d, e1, e2, face, same_loop)?;
    if let Some(k) = kind {
        options.retain(|&(s1, s2)| (s1 != s2) == (k == R2Kind::Parallel));
    }
    let (s1, s2) = match options.as_slice() {
        [] => {
            return Err(Error::Move(format!(
                "edges {e1} and {e2} do not face a common region{}",
                if kind.is_some() { " with the requested orientations" } else { "" }
            )))
        }
        [one] => *one,
        _ => {
            return Err(Error::Move(format!(
                "edges {e1} and {e2} face each other across several regions; name the face"
            )))
        }
    };
    let n = d.n_crossings();
    let m = d.max_edge();
    let mut b = Rebuild::keep_all(d);
    let mut next = m;
    let mut fresh = || {
        next += 1;
        next
    };
    let (e1a, e2a) = (e1, e2);
    let e1b = fresh();
    let (e1c, e2b, e2c);
    if same_loop {
        // the loop splits into the two halves: e1c continues as e2a, e2c as e1a
        e1c = fresh();
        e2b = fresh();
        e2c = e1a;
    } else {
        e1c = if d.is_loop(e1) { e1a } else { fresh() };
        e2b = fresh();
        e2c = if d.is_loop(e2) { e2a } else { fresh() };
    }
    let e2a = if same_loop { e1c } else { e2a };
    if !d.is_loop(e1) {
        b.set_slot(d.head(e1).unwrap(), e1c);
    }
    if !same_loop && !d.is_loop(e2) {
        b.set_slot(d.head(e2).unwrap(), e2c);
    }
    // local picture: e1 below the face, e2 above it, the finger of e1 crossing
    // e2 at P (west) and Q (east); ends listed E, N, W, S
    let east1 = s1 == Side::Left;
    let east2 = s2 == Side::Right;
    let (p_s, p_n) = if east1 { ((e1a, true), (e1b, false)) } else { ((e1c, false), (e1b, true)) };
    let (q_s, q_n) = if east1 { ((e1c, false), (e1b, true)) } else { ((e1a, true), (e1b, false)) };
    let (p_e, p_w) = if east2 { ((e2b, false), (e2a, true)) } else { ((e2b, true), (e2c, false)) };
    let (q_e, q_w) = if east2 { ((e2c, false), (e2b, true)) } else { ((e2a, true), (e2b, false)) };
    b.crossings.push(Crossing::from_ccw([p_e, p_n, p_w, p_s], 0));
    b.crossings.push(Crossing::from_ccw([q_e, q_n, q_w, q_s], 0));
    for e in [e1, e2] {
        if d.is_loop(e) {
            b.remove_loop(e);
        }
    }
    if d.is_loop(e1) && d.is_loop(e2) {
        let l = d.free_loop(e1).unwrap();
        if loop_region(d, l) != Region::Outer {
            return Err(Error::Move("two loops in a bounded face would form a nested piece".into()));
        }
        // e1a runs along the far side of the first loop, next to its exterior
        let exterior = if l.exterior_on_left { Side::Left } else { Side::Right };
        b.fresh_outer.push((e1a, exterior));
    }
    let diagram = b.finish()?;
    Ok(Applied {
        diagram,
        site: Site::Bigon {
            crossings: [n, n + 1],
            bigon: [e1b, e2b],
            added: true,
        },
    })
}

/// Removes crossings, splicing each strand through them. Returns the new
/// crossings, the crossing map and the closed chains that became loops,
/// each as `(smallest edge, edges of the chain)`.
fn splice(d: &LinkDiagram, removed: &BTreeSet<usize>) -> (Vec<Crossing>, Vec<Option<usize>>, Vec<(EdgeId, Vec<EdgeId>)>) {
    let mut map = Vec::with_capacity(d.n_crossings());
    let mut crossings = Vec::new();
    for (i, x) in d.crossings().iter().enumerate() {
        if removed.contains(&i) {
            map.push(None);
        } else {
            map.push(Some(crossings.len()));
            crossings.push(x.clone());
        }
    }
    let mut visited = BTreeSet::new();
    let follow = |e: EdgeId| d.edge_at(d.head(e).unwrap().opposite());
    for e0 in d.edges() {
        let Some(t) = d.tail(e0) else { continue };
        if removed.contains(&t.crossing) {
            continue;
        }
        let mut e = e0;
        loop {
            visited.insert(e);
            let h = d.head(e).unwrap();
            if !removed.contains(&h.crossing) {
                let j = map[h.crossing].unwrap();
                crossings[j].edges[h.pos as usize] = e0;
                break;
            }
            e = follow(e);
        }
    }
    let mut cycles = Vec::new();
    for e0 in d.edges() {
        if visited.contains(&e0) || d.is_loop(e0) {
            continue;
        }
        let mut chain = Vec::new();
        let mut e = e0;
        while visited.insert(e) {
            chain.push(e);
            e = follow(e);
        }
        let id = *chain.iter().min().unwrap();
        cycles.push((id, chain));
    }
    (crossings, map, cycles)
}

/// Rebuild for a removal; closed chains become loops in the outer region.
/// A closed chain keeps the id `prefer` if it has it, else its smallest id
/// outside `avoid`.
fn removal<'a>(d: &'a LinkDiagram, removed: &BTreeSet<usize>, prefer: EdgeId, avoid: &[EdgeId]) -> Result<Rebuild<'a>> {
    let (crossings, crossing_map, mut cycles) = splice(d, removed);
    for (id, chain) in cycles.iter_mut() {
        if chain.contains(&prefer) {
            *id = prefer;
        } else if let Some(&e) = chain.iter().filter(|e| !avoid.contains(e)).min() {
            *id = e;
        }
    }
    let mut b = Rebuild::keep_all(d);
    b.crossings = crossings;
    b.crossing_map = crossing_map;
    for (id, chain) in cycles {
        // the chain was a whole piece; it must have been in the outer region
        let c = d.tail(chain[0]).unwrap().crossing;
        let outer = d.piece_outer_faces()[d.piece_of(c)];
        let piece_faces: BTreeSet<FaceId> = (0..d.n_crossings())
            .filter(|&i| d.piece_of(i) == d.piece_of(c))
            .flat_map(|i| (0..4).map(move |q| 4 * i + q))
            .map(|k| d.corner_face(k))
            .collect();
        if d.loops().iter().any(|l| l.face.is_some_and(|f| f != outer && piece_faces.contains(&f))) {
            return Err(Error::Move("loops inside the removed piece would end up nested".into()));
        }
        let mut exterior_on_left = None;
        for &e in &chain {
            if d.left_face(e) == Some(outer) {
                exterior_on_left = Some(true);
                break;
            }
            if d.right_face(e) == Some(outer) {
                exterior_on_left = Some(false);
                break;
            }
        }
        let cw = exterior_on_left
            .ok_or_else(|| Error::Move("the unknotted piece does not touch its outer face".into()))?;
        b.loops.push((id, cw, Place::New(None)));
    }
    Ok(b)
}

fn check_crossing(d: &LinkDiagram, c: usize) -> Result<()> {
    if c < d.n_crossings() {
        Ok(())
    } else {
        Err(Error::Move(format!("crossing {c} does not exist")))
    }
}

fn faces_with_loops(d: &LinkDiagram) -> BTreeSet<FaceId> {
    d.loops().iter().filter_map(|l| d.loop_face(l)).collect()
}

fn unr1(d: &LinkDiagram, c: usize, kink: Option<EdgeId>) -> Result<Applied> {
    check_crossing(d, c)?;
    let x = &d.crossings()[c];
    let busy = faces_with_loops(d);
    // kink edges: both ends at c on adjacent positions, with an empty bounded lobe
    let mut candidates = Vec::new();
    for p in 0..4u8 {
        let e = x.edges[p as usize];
        let (t, h) = (d.tail(e).unwrap(), d.head(e).unwrap());
        if t.crossing != c || h.crossing != c || (t.pos + 1) % 4 != h.pos && (h.pos + 1) % 4 != t.pos {
            continue;
        }
        if candidates.iter().any(|&(k, _)| k == e) {
            continue;
        }
        let q = if (t.pos + 1) % 4 == h.pos { t.pos } else { h.pos };
        let lobe = d.corner_face(4 * c + q as usize);
        if d.is_outer_face(lobe) || busy.contains(&lobe) {
            continue;
        }
        candidates.push((e, h.pos));
    }
    candidates.sort();
    let (k, _) = match kink {
        Some(e) => *candidates
            .iter()
            .find(|&&(k, _)| k == e)
            .ok_or_else(|| Error::Move(format!("edge {e} is not a removable kink at crossing {c}")))?,
        None => *candidates
            .first()
            .ok_or_else(|| Error::Move(format!("crossing {c} has no removable kink")))?,
    };
    // the strand enters the crossing opposite to where the kink leaves
    let enter_pos = (d.tail(k).unwrap().pos + 2) % 4;
    let strand = x.edges[enter_pos as usize];
    let b = removal(d, &BTreeSet::from([c]), strand, &[])?;
    let diagram = b.finish()?;
    debug_assert!(diagram.has_edge(strand));
    Ok(Applied {
        diagram,
        site: Site::Kink {
            crossing: c,
            kink: k,
            strand,
            added: false,
        },
    })
}

fn unr2(d: &LinkDiagram, c1: usize, c2: usize) -> Result<Applied> {
    check_crossing(d, c1)?;
    check_crossing(d, c2)?;
    if c1 == c2 {
        return Err(Error::Move("unr2 needs two different crossings".into()));
    }
    let over_pos = |s: Slot| s.pos % 2 == 1;
    let mut over_edges = Vec::new();
    let mut under_edges = Vec::new();
    for e in d.edges() {
        let (Some(t), Some(h)) = (d.tail(e), d.head(e)) else { continue };
        let ends = BTreeSet::from([t.crossing, h.crossing]);
        if ends != BTreeSet::from([c1, c2]) {
            continue;
        }
        match (over_pos(t), over_pos(h)) {
            (true, true) => over_edges.push(e),
            (false, false) => under_edges.push(e),
            _ => {}
        }
    }
    let busy = faces_with_loops(d);
    let mut found = None;
    // latest edges first, so undoing a fresh bigon picks that bigon
    'search: for &f in over_edges.iter().rev() {
        for &g in under_edges.iter().rev() {
            for sf in [Side::Left, Side::Right] {
                for sg in [Side::Left, Side::Right] {
                    let face = |e, s| match s {
                        Side::Left => d.left_face(e).unwrap(),
                        Side::Right => d.right_face(e).unwrap(),
                    };
                    let bf = face(f, sf);
                    if bf != face(g, sg) || d.is_outer_face(bf) || busy.contains(&bf) {
                        continue;
                    }
                    let corners = (0..4 * d.n_crossings()).filter(|&k| d.corner_face(k) == bf).count();
                    if corners == 2 {
                        found = Some((f, g));
                        break 'search;
                    }
                }
            }
        }
    }
    let (f, g) = found.ok_or_else(|| {
        Error::Move(format!("crossings {c1} and {c2} do not bound an empty bigon with one strand over at both"))
    })?;
    let b = removal(d, &BTreeSet::from([c1, c2]), EdgeId::MAX, &[f, g])?;
    let diagram = b.finish()?;
    let mut crossings = [c1, c2];
    crossings.sort();
    Ok(Applied {
        diagram,
        site: Site::Bigon {
            crossings,
            bigon: [f, g],
            added: false,
        },
    })
}
