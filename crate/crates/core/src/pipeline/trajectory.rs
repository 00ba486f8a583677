//! Multi-frame XYZ-style trajectories.
//!
//! Each frame is an atom-count line, a free-form comment line, then one line
//! per atom holding three coordinates. A leading element label on atom lines
//! is accepted and ignored. Coordinates are written in Rust's shortest
//! round-trip form, so writing a parsed file reproduces it byte for byte.

use std::fmt::Write as _;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

pub type Atom = [f64; 3];

#[derive(Debug, Clone, PartialEq)]
pub struct Frame {
    pub comment: String,
    pub atoms: Vec<Atom>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    frames: Vec<Frame>,
}

impl Trajectory {
    pub fn new(frames: Vec<Frame>) -> Result<Self> {
        let Some(first) = frames.first() else {
            return Err(Error::config("trajectory has no frames"));
        };
        let atoms = first.atoms.len();
        if atoms == 0 {
            return Err(Error::config("trajectory frames hold no atoms"));
        }
        if let Some((i, f)) = frames
            .iter()
            .enumerate()
            .find(|(_, f)| f.atoms.len() != atoms)
        {
            return Err(Error::config(format!(
                "frame {i} has {} atoms, frame 0 has {atoms}",
                f.atoms.len()
            )));
        }
        Ok(Self { frames })
    }

    pub fn frames(&self) -> &[Frame] {
        &self.frames
    }

    pub fn num_atoms(&self) -> usize {
        self.frames[0].atoms.len()
    }

    pub fn to_xyz(&self) -> String {
        let mut out = String::new();
        for frame in &self.frames {
            let _ = writeln!(out, "{}", frame.atoms.len());
            let _ = writeln!(out, "{}", frame.comment);
            for [x, y, z] in &frame.atoms {
                let _ = writeln!(out, "{x:?} {y:?} {z:?}");
            }
        }
        out
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_xyz())?;
        Ok(())
    }
}

pub fn read_trajectory(path: &Path) -> Result<Trajectory> {
    if !path.exists() {
        return Err(Error::config(format!(
            "trajectory file {} does not exist",
            path.display()
        )));
    }
    parse_trajectory(&std::fs::read_to_string(path)?)
}

pub fn parse_trajectory(text: &str) -> Result<Trajectory> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l)).peekable();
    let mut frames: Vec<Frame> = Vec::new();
    loop {
        // skip blank separators between frames
        while lines.peek().is_some_and(|(_, l)| l.trim().is_empty()) {
            lines.next();
        }
        let Some((line_no, header)) = lines.next() else {
            break;
        };
        let frame_index = frames.len();
        let count: usize = header.trim().parse().map_err(|_| Error::Parse {
            line: line_no,
            message: format!(
                "frame {frame_index}: expected atom count, found '{}'",
                header.trim()
            ),
        })?;
        if let Some(first) = frames.first() {
            if count != first.atoms.len() {
                return Err(Error::Parse {
                    line: line_no,
                    message: format!(
                        "frame {frame_index} has {count} atoms, frame 0 has {}",
                        first.atoms.len()
                    ),
                });
            }
        }
        let (_, comment) = lines.next().ok_or(Error::Parse {
            line: line_no + 1,
            message: format!("frame {frame_index}: missing comment line"),
        })?;
        let mut atoms = Vec::with_capacity(count);
        for k in 0..count {
            let (line_no, line) = lines.next().ok_or(Error::Parse {
                line: line_no + 2 + k,
                message: format!("frame {frame_index}: expected {count} atoms, found {k}"),
            })?;
            atoms.push(parse_atom(line).map_err(|message| Error::Parse {
                line: line_no,
                message: format!("frame {frame_index}: {message}"),
            })?);
        }
        frames.push(Frame {
            comment: comment.to_string(),
            atoms,
        });
    }
    Trajectory::new(frames)
}

fn parse_atom(line: &str) -> std::result::Result<Atom, String> {
    let mut fields: Vec<&str> = line.split_whitespace().collect();
    if fields.len() == 4 && fields[0].parse::<f64>().is_err() {
        fields.remove(0);
    }
    if fields.len() != 3 {
        return Err(format!(
            "expected 3 coordinates, found {} fields",
            fields.len()
        ));
    }
    let mut atom = [0.0; 3];
    for (slot, field) in atom.iter_mut().zip(&fields) {
        let value: f64 = field
            .parse()
            .map_err(|_| format!("non-numeric coordinate '{field}'"))?;
        if !value.is_finite() {
            return Err(format!("non-finite coordinate '{field}'"));
        }
        *slot = value;
    }
    Ok(atom)
}

/// Uniform coordinates in [0, 1)³, reproducible per seed.
pub fn gen_trajectory(num_frames: usize, num_atoms: usize, seed: u64) -> Result<Trajectory> {
    if num_frames == 0 || num_atoms == 0 {
        return Err(Error::config("frame and atom counts must be positive"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let frames = (0..num_frames)
        .map(|i| Frame {
            comment: format!("frame {i}"),
            atoms: (0..num_atoms).map(|_| random_atom(&mut rng)).collect(),
        })
        .collect();
    Trajectory::new(frames)
}

pub(crate) fn random_atom(rng: &mut impl Rng) -> Atom {
    [rng.random(), rng.random(), rng.random()]
}
