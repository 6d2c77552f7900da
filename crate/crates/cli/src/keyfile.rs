//! On-disk key files.
//!
//! Secret: `"CSKS"` ∥ u16 version ∥ u8 suite_len ∥ suite ∥ 32-byte seed.
//! Public: `"CSKP"` ∥ u16 version ∥ u8 suite_len ∥ suite ∥ 32-byte key.

use std::fs::{self, OpenOptions};
use std::io::Write;
use std::path::{Path, PathBuf};

use csev::keys::{PUBLIC_KEY_LEN, SEED_LEN};
use csev::{KeyPair, PublicKey, SuiteId};

use crate::CliError;

pub const SECRET_MAGIC: &[u8; 4] = b"CSKS";
pub const PUBLIC_MAGIC: &[u8; 4] = b"CSKP";
const VERSION: u16 = 1;

pub fn public_path(secret: &Path) -> PathBuf {
    let mut s = secret.as_os_str().to_owned();
    s.push(".pub");
    PathBuf::from(s)
}

fn encode(magic: &[u8; 4], suite: SuiteId, body: &[u8]) -> Vec<u8> {
    let name = suite.as_str().as_bytes();
    let mut v = Vec::with_capacity(4 + 2 + 1 + name.len() + body.len());
    v.extend_from_slice(magic);
    v.extend_from_slice(&VERSION.to_be_bytes());
    v.push(name.len() as u8);
    v.extend_from_slice(name);
    v.extend_from_slice(body);
    v
}

fn decode<'a>(
    magic: &[u8; 4],
    path: &Path,
    bytes: &'a [u8],
    body_len: usize,
) -> Result<(SuiteId, &'a [u8]), CliError> {
    let bad = |why: &str| CliError::Config(format!("{}: not a key file ({why})", path.display()));
    if bytes.len() < 7 || &bytes[..4] != magic {
        return Err(bad("bad magic"));
    }
    if u16::from_be_bytes([bytes[4], bytes[5]]) != VERSION {
        return Err(bad("unsupported version"));
    }
    let n = bytes[6] as usize;
    if bytes.len() != 7 + n + body_len {
        return Err(bad("wrong length"));
    }
    let suite = std::str::from_utf8(&bytes[7..7 + n])
        .ok()
        .and_then(|s| s.parse::<SuiteId>().ok())
        .ok_or_else(|| bad("unknown suite"))?;
    Ok((suite, &bytes[7 + n..]))
}

/// Writes the secret key (mode 0600) and its public half next to it.
pub fn write_keypair(
    path: &Path,
    suite: SuiteId,
    kp: &KeyPair,
    force: bool,
) -> Result<(), CliError> {
    let pub_path = public_path(path);
    if !force {
        for p in [path, pub_path.as_path()] {
            if p.exists() {
                return Err(CliError::Config(format!(
                    "{} already exists (pass --force to overwrite)",
                    p.display()
                )));
            }
        }
    }
    let mut opts = OpenOptions::new();
    opts.write(true).create(true).truncate(true);
    #[cfg(unix)]
    {
        use std::os::unix::fs::OpenOptionsExt;
        opts.mode(0o600);
    }
    let mut f = opts.open(path)?;
    #[cfg(unix)]
    {
        use std::os::unix::fs::PermissionsExt;
        f.set_permissions(fs::Permissions::from_mode(0o600))?;
    }
    f.write_all(&encode(SECRET_MAGIC, suite, kp.secret_key()))?;
    f.sync_all()?;
    fs::write(
        &pub_path,
        encode(PUBLIC_MAGIC, suite, kp.public_key().as_bytes()),
    )?;
    Ok(())
}

pub fn read_secret(path: &Path) -> Result<(SuiteId, KeyPair), CliError> {
    let bytes = fs::read(path)?;
    let (suite, seed) = decode(SECRET_MAGIC, path, &bytes, SEED_LEN)?;
    Ok((suite, KeyPair::from_seed(seed.try_into().unwrap())))
}

/// Reads `<path>.pub`, falling back to deriving it from the secret file.
pub fn read_public(path: &Path) -> Result<(SuiteId, PublicKey), CliError> {
    let pub_path = public_path(path);
    if !pub_path.exists() && path.exists() {
        let (suite, kp) = read_secret(path)?;
        return Ok((suite, kp.public_key().clone()));
    }
    let bytes = fs::read(&pub_path)?;
    let (suite, key) = decode(PUBLIC_MAGIC, &pub_path, &bytes, PUBLIC_KEY_LEN)?;
    Ok((suite, PublicKey::from_bytes(key)?))
}
