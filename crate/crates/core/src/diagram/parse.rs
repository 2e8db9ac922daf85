use std::collections::BTreeMap;

use super::{Crossing, EdgeId, FaceId, FreeLoop, LinkDiagram, Slot};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
enum Token {
    Cross {
        text: String,
        edges: [EdgeId; 4],
        sign: Option<bool>,
    },
    Loop(FreeLoop),
}

fn parse_int_list(body: &str, token: &str) -> Result<Vec<usize>> {
    body.split(',')
        .map(|s| {
            s.trim()
                .parse::<usize>()
                .map_err(|_| Error::Parse(format!("bad edge label `{}` in `{token}`", s.trim())))
        })
        .collect()
}

fn tokenize(text: &str) -> Result<Vec<Token>> {
    let mut out = Vec::new();
    let mut rest = text.trim();
    while !rest.is_empty() {
        let open = rest
            .find('[')
            .ok_or_else(|| Error::Parse(format!("malformed token `{rest}`")))?;
        let close = rest
            .find(']')
            .ok_or_else(|| Error::Parse(format!("unterminated token `{rest}`")))?;
        if close < open {
            return Err(Error::Parse(format!("malformed token `{}`", &rest[..=close])));
        }
        let head = rest[..open].trim();
        let body = &rest[open + 1..close];
        let after = &rest[close + 1..];
        // optional suffix up to the next separator
        let suffix_len = after
            .find(|c: char| c.is_whitespace() || c == ',' || c == 'X' || c == 'O')
            .unwrap_or(after.len());
        let suffix = after[..suffix_len].trim();
        let token = format!("{head}[{body}]{suffix}");
        match head {
            "X" => {
                let v = parse_int_list(body, &token)?;
                if v.len() != 4 {
                    return Err(Error::Parse(format!(
                        "`{token}`: a crossing needs 4 edge labels, got {}",
                        v.len()
                    )));
                }
                let sign = match suffix {
                    "" => None,
                    "+" => Some(true),
                    "-" => Some(false),
                    s => return Err(Error::Parse(format!("`{token}`: unknown annotation `{s}`"))),
                };
                out.push(Token::Cross {
                    text: token,
                    edges: [v[0], v[1], v[2], v[3]],
                    sign,
                });
            }
            "O" => {
                let v = parse_int_list(body, &token)?;
                if v.is_empty() || v.len() > 2 {
                    return Err(Error::Parse(format!("`{token}`: expected O[edge] or O[edge,face]")));
                }
                let exterior_on_left = match suffix {
                    "" | "ccw" => false,
                    "cw" => true,
                    s => return Err(Error::Parse(format!("`{token}`: unknown annotation `{s}`"))),
                };
                out.push(Token::Loop(FreeLoop {
                    edge: v[0],
                    face: v.get(1).copied(),
                    exterior_on_left,
                }));
            }
            _ => return Err(Error::Parse(format!("malformed token `{token}`"))),
        }
        rest = after[suffix_len..].trim_start_matches(|c: char| c.is_whitespace() || c == ',');
    }
    Ok(out)
}

/// Parses whitespace-separated `X[a,b,c,d]` tokens (optionally suffixed by
/// `+`/`-` to fix the crossing sign) and `O[e]`/`O[e,face]` free loops
/// (optionally suffixed `cw`).
///
/// Over-strand directions are inferred per component from its under-passes
/// and annotations; a component that only ever passes over, without
/// annotations, is oriented so that edge labels increase along it.
pub fn parse_pd(text: &str) -> Result<LinkDiagram> {
    parse_pd_with_outer(text, None)
}

pub(crate) fn parse_pd_with_outer(text: &str, outer: Option<FaceId>) -> Result<LinkDiagram> {
    let tokens = tokenize(text)?;
    let mut raw: Vec<(String, [EdgeId; 4], Option<bool>)> = Vec::new();
    let mut loops = Vec::new();
    for t in tokens {
        match t {
            Token::Cross { text, edges, sign } => raw.push((text, edges, sign)),
            Token::Loop(l) => loops.push(l),
        }
    }
    let mut slots: BTreeMap<EdgeId, Vec<Slot>> = BTreeMap::new();
    for (c, (_, edges, _)) in raw.iter().enumerate() {
        for (p, &e) in edges.iter().enumerate() {
            slots.entry(e).or_default().push(Slot::new(c, p as u8));
        }
    }
    for (&e, s) in &slots {
        if s.len() != 2 {
            return Err(Error::Parse(format!(
                "edge {e} appears {} time(s), expected 2 (in `{}`)",
                s.len(),
                raw[s[0].crossing].0
            )));
        }
    }
    // over_in per crossing, filled by traversal
    let mut over_in: Vec<Option<u8>> = vec![None; raw.len()];
    let mut visited: BTreeMap<EdgeId, bool> = BTreeMap::new();
    for (&e0, s0) in &slots {
        if visited.contains_key(&e0) {
            continue;
        }
        // passes: (crossing, entering position)
        let mut passes: Vec<(usize, u8)> = Vec::new();
        let mut seq = Vec::new();
        let start = s0[0];
        let (mut e, mut enter) = (e0, start);
        loop {
            visited.insert(e, true);
            seq.push(e);
            passes.push((enter.crossing, enter.pos));
            let exit = enter.opposite();
            let next = raw[exit.crossing].1[exit.pos as usize];
            let ns = &slots[&next];
            let next_enter = if ns[0] == exit { ns[1] } else { ns[0] };
            if next == e0 && next_enter == start {
                break;
            }
            e = next;
            enter = next_enter;
        }
        // votes: +1 forward, -1 backward
        let mut vote: Option<(bool, usize)> = None;
        for &(c, p) in &passes {
            let v = match (p, raw[c].2) {
                (0, _) => Some(true),
                (2, _) => Some(false),
                (3, Some(pos)) => Some(pos),
                (1, Some(pos)) => Some(!pos),
                _ => None,
            };
            if let Some(v) = v {
                match vote {
                    None => vote = Some((v, c)),
                    Some((w, c0)) if w != v => {
                        return Err(Error::Parse(format!(
                            "inconsistent orientation at `{}` (conflicts with `{}`)",
                            raw[c].0, raw[c0].0
                        )))
                    }
                    _ => {}
                }
            }
        }
        let forward = match vote {
            Some((v, _)) => v,
            None => seq.len() <= 2 || seq[1] < seq[seq.len() - 1],
        };
        for &(c, p) in &passes {
            let entering = if forward { p } else { (p + 2) % 4 };
            if entering % 2 == 1 {
                over_in[c] = Some(entering);
            }
        }
    }
    let crossings = raw
        .iter()
        .zip(over_in)
        .map(|((_, edges, _), o)| Crossing::new(*edges, o.expect("every crossing traversed")))
        .collect();
    LinkDiagram::new(crossings, loops, outer)
}

/// Closure of a braid word on `strands` strands. Letter `k > 0` is the
/// positive generator between strands `k` and `k + 1`, `-k` its inverse.
pub fn parse_braid(word: &[i64], strands: usize) -> Result<LinkDiagram> {
    if strands == 0 {
        return Err(Error::Input("a braid needs at least one strand".into()));
    }
    for &k in word {
        if k == 0 || k.unsigned_abs() as usize >= strands {
            return Err(Error::Input(format!(
                "braid letter {k} out of range for {strands} strands"
            )));
        }
    }
    let mut cur: Vec<EdgeId> = (1..=strands).collect();
    let mut next = strands + 1;
    let mut crossings: Vec<[EdgeId; 4]> = Vec::new();
    let mut over: Vec<u8> = Vec::new();
    for &k in word {
        let p = k.unsigned_abs() as usize - 1;
        let (a, b) = (cur[p], cur[p + 1]);
        let (c, d) = (next, next + 1);
        next += 2;
        if k > 0 {
            crossings.push([b, d, c, a]);
            over.push(3);
        } else {
            crossings.push([a, b, d, c]);
            over.push(1);
        }
        cur[p] = c;
        cur[p + 1] = d;
    }
    // close up: the top edge at each position is the bottom edge there
    let mut subst: BTreeMap<EdgeId, EdgeId> = BTreeMap::new();
    for (p, &top) in cur.iter().enumerate() {
        if top != p + 1 {
            subst.insert(top, p + 1);
        }
    }
    let mut used: BTreeMap<EdgeId, EdgeId> = BTreeMap::new();
    for x in crossings.iter_mut() {
        for e in x.iter_mut() {
            if let Some(&s) = subst.get(e) {
                *e = s;
            }
            used.insert(*e, 0);
        }
    }
    // compact relabeling 1..E in increasing order, loops afterwards
    let mut label = 1;
    for v in used.values_mut() {
        *v = label;
        label += 1;
    }
    let crossings = crossings
        .into_iter()
        .zip(over)
        .map(|(x, o)| Crossing::new(x.map(|e| used[&e]), o))
        .collect();
    let loops = (1..=strands)
        .filter(|e| !used.contains_key(e))
        .enumerate()
        .map(|(i, _)| FreeLoop {
            edge: label + i,
            face: None,
            exterior_on_left: false,
        })
        .collect();
    LinkDiagram::new(crossings, loops, None)
}

/// A parsed input file.
#[derive(Clone, Debug)]
pub struct DiagramInput {
    pub diagram: LinkDiagram,
}

/// Parses the text input format:
///
/// ```text
/// # comment
/// pd: X[1,4,2,5] X[3,6,4,1] X[5,2,6,3]
/// outer: 2
/// ```
///
/// or `braid: s 3 ; w 1 -2 1 -2`. Exactly one `pd:` or `braid:` line.
pub fn parse_input(text: &str) -> Result<DiagramInput> {
    let mut source: Option<(&str, &str)> = None;
    let mut outer: Option<FaceId> = None;
    for line in text.lines() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, val) = line
            .split_once(':')
            .ok_or_else(|| Error::Parse(format!("expected `key: value`, got `{line}`")))?;
        match key.trim() {
            k @ ("pd" | "braid") => {
                if source.is_some() {
                    return Err(Error::Parse("more than one diagram in input".into()));
                }
                source = Some((k, val.trim()));
            }
            "outer" => {
                outer = Some(val.trim().parse().map_err(|_| {
                    Error::Parse(format!("bad outer face `{}`", val.trim()))
                })?)
            }
            k => return Err(Error::Parse(format!("unknown key `{k}`"))),
        }
    }
    let diagram = match source {
        None => return Err(Error::Input("no `pd:` or `braid:` line in input".into())),
        Some(("pd", body)) => parse_pd_with_outer(body, outer)?,
        Some((_, body)) => {
            let (strands, word) = parse_braid_spec(body)?;
            parse_braid(&word, strands)?.with_outer_hint(outer)?
        }
    };
    Ok(DiagramInput { diagram })
}

fn parse_braid_spec(body: &str) -> Result<(usize, Vec<i64>)> {
    let mut strands = None;
    let mut word = Vec::new();
    for part in body.split(';') {
        let mut it = part.split_whitespace();
        match it.next() {
            Some("s") => {
                let n = it
                    .next()
                    .and_then(|s| s.parse().ok())
                    .ok_or_else(|| Error::Parse(format!("bad strand count in `{part}`")))?;
                strands = Some(n);
            }
            Some("w") => {
                for t in it {
                    word.push(
                        t.trim_matches(',')
                            .parse()
                            .map_err(|_| Error::Parse(format!("bad braid letter `{t}`")))?,
                    );
                }
            }
            None => {}
            Some(t) => return Err(Error::Parse(format!("unknown braid field `{t}`"))),
        }
    }
    let strands = strands.ok_or_else(|| Error::Parse("braid needs `s <strands>`".into()))?;
    Ok((strands, word))
}
