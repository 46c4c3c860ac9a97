#include "staplegrid/cli.hpp"

#include <csignal>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "staplegrid/bench.hpp"
#include "staplegrid/config.hpp"
#include "staplegrid/crypto.hpp"
#include "staplegrid/dlms_sim.hpp"
#include "staplegrid/error.hpp"
#include "staplegrid/pem.hpp"
#include "staplegrid/responder_service.hpp"
#include "staplegrid/signed_collection.hpp"
#include "staplegrid/staple_cache.hpp"
#include "staplegrid/test_ca.hpp"

namespace staplegrid::cli {

namespace fs = std::filesystem;

namespace {

Bytes slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(Errc::Io, "cannot read " + path);
  return Bytes(std::istreambuf_iterator<char>(in), {});
}

void spit(const std::string& path, BytesView data) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(Errc::Io, "cannot write " + path);
  out.write(reinterpret_cast<const char*>(data.data()), static_cast<std::streamsize>(data.size()));
  if (!out) fail(Errc::Io, "short write to " + path);
}

std::string as_text(BytesView b) { return std::string(b.begin(), b.end()); }

// Writes to `path`, or to `out` when the path is empty or "-".
void emit_text(std::ostream& out, const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") out << text;
  else spit(path, to_bytes(text));
}

struct Context {
  std::ostream& out;
  std::ostream& err;
  std::string config_path;
  std::string now_text;
  KeyValueConfig config;

  UtcTime now() const { return now_text.empty() ? utc_now() : parse_sql_time(now_text); }

  // Flag value if given, else the config key, else a usage error.
  std::string pick(const std::string& flag, const std::string& key, const std::string& what) const {
    if (!flag.empty()) return flag;
    if (auto v = config.get(key)) return *v;
    throw CLI::RequiredError(what + " (or config key " + key + ")");
  }
};

std::vector<CertMeta> load_certs(const std::vector<std::string>& paths) {
  std::vector<CertMeta> out;
  for (const auto& p : paths) out.push_back(load_certificate(slurp(p)));
  return out;
}

// ---- ca ----

struct CaArgs {
  std::string dir, subject = "C=TW, O=staplegrid, CN=staplegrid-root", out, key_out, ocsp_url, crl_url, serial,
                   reason = "keyCompromise";
  std::uint64_t seed = 0;
  int days = 365;
  bool ocsp_signing = false, der = false;
};

void add_ca(CLI::App& app, Context& ctx, std::function<int()>& action) {
  auto* ca = app.add_subcommand("ca", "Test certificate authority kept in a state directory");
  ca->require_subcommand(1);
  auto a = std::make_shared<CaArgs>();
  auto dir_opt = [&](CLI::App* sc) { sc->add_option("--dir", a->dir, "CA state directory (config: ca.dir)"); };

  auto* init = ca->add_subcommand("init", "Create a self-signed root and an empty CRL");
  dir_opt(init);
  init->add_option("--subject", a->subject, "Root distinguished name");
  init->add_option("--seed", a->seed, "Make keys and serials reproducible");
  init->callback([&, a] {
    action = [&, a] {
      fs::path dir = ctx.pick(a->dir, "ca.dir", "--dir");
      if (fs::exists(dir / "root.pem")) fail(Errc::InvalidArgument, dir.string() + " already holds a CA");
      UtcTime now = ctx.now();
      auto authority = TestAuthority::generate_root(DistinguishedName::from_string(a->subject), now,
                                                    a->seed ? std::optional(a->seed) : std::nullopt);
      authority.emit_crl(now);
      authority.save(dir);
      ctx.out << "root " << authority.root().serial_number.to_hex() << ' ' << authority.root().subject_dn.to_string()
              << '\n';
      return 0;
    };
  });

  auto* issue = ca->add_subcommand("issue", "Issue a leaf certificate (PEM)");
  dir_opt(issue);
  issue->add_option("--subject", a->subject, "Leaf distinguished name")->required();
  issue->add_option("--ocsp-url", a->ocsp_url, "Authority Information Access OCSP URL");
  issue->add_option("--crl-url", a->crl_url, "CRL distribution point");
  issue->add_option("--days", a->days, "Validity in days")->check(CLI::PositiveNumber);
  issue->add_flag("--ocsp-signing", a->ocsp_signing, "Add the OCSPSigning extended key usage");
  issue->add_option("--out", a->out, "Certificate output (default stdout)");
  issue->add_option("--key-out", a->key_out, "Write the leaf private key here");
  issue->callback([&, a] {
    action = [&, a] {
      fs::path dir = ctx.pick(a->dir, "ca.dir", "--dir");
      auto authority = TestAuthority::load(dir);
      auto key = SigningKey::generate();
      IssueOptions opts;
      if (!a->ocsp_url.empty()) opts.aia_ocsp_url = a->ocsp_url;
      if (!a->crl_url.empty()) opts.crl_dp_url = a->crl_url;
      opts.validity_days = a->days;
      opts.ocsp_signing = a->ocsp_signing;
      opts.public_key_info = key.public_key_der();
      auto cert = authority.issue_cert(DistinguishedName::from_string(a->subject), opts, ctx.now());
      authority.save(dir);
      if (!a->key_out.empty()) {
        spit(a->key_out, to_bytes(key.to_pem()));
        fs::permissions(a->key_out, fs::perms::owner_read | fs::perms::owner_write, fs::perm_options::replace);
      }
      emit_text(ctx.out, a->out, pem_encode("CERTIFICATE", cert.raw_der));
      ctx.err << "issued serial " << cert.serial_number.to_hex() << '\n';
      return 0;
    };
  });

  auto* revoke = ca->add_subcommand("revoke", "Revoke a serial and publish a new CRL");
  dir_opt(revoke);
  revoke->add_option("--serial", a->serial, "Serial number, hex")->required();
  revoke->add_option("--reason", a->reason, "CRL reason, e.g. keyCompromise");
  revoke->callback([&, a] {
    action = [&, a] {
      fs::path dir = ctx.pick(a->dir, "ca.dir", "--dir");
      auto reason = reason_from_name(a->reason);
      if (!reason) throw CLI::ValidationError("--reason", "unknown revocation reason " + a->reason);
      auto authority = TestAuthority::load(dir);
      UtcTime now = ctx.now();
      authority.revoke(SerialNumber::from_hex(a->serial), *reason, now);
      authority.emit_crl(now);
      authority.save(dir);
      ctx.out << "revoked " << SerialNumber::from_hex(a->serial).to_hex() << " crl_number "
              << authority.crl_number() << '\n';
      return 0;
    };
  });

  auto* crl = ca->add_subcommand("crl", "Emit a fresh CRL");
  dir_opt(crl);
  crl->add_option("--out", a->out, "Output file (default stdout)");
  crl->add_flag("--der", a->der, "DER instead of PEM");
  crl->callback([&, a] {
    action = [&, a] {
      fs::path dir = ctx.pick(a->dir, "ca.dir", "--dir");
      auto authority = TestAuthority::load(dir);
      auto snap = authority.emit_crl(ctx.now());
      authority.save(dir);
      if (a->der) {
        if (a->out.empty() || a->out == "-") throw CLI::ValidationError("--der", "needs --out");
        spit(a->out, snap.raw);
      } else {
        emit_text(ctx.out, a->out, pem_encode("X509 CRL", snap.raw));
      }
      return 0;
    };
  });
}

// ---- responder ----

struct ServeArgs {
  std::string listen, crl_source, issuer, key, signer, refresh, validity, run_for;
  int port = -1;
};

// Blocks until SIGINT/SIGTERM or the deadline.
void wait_for_shutdown(std::optional<Seconds> deadline) {
  sigset_t set;
  sigemptyset(&set);
  sigaddset(&set, SIGINT);
  sigaddset(&set, SIGTERM);
  timespec ts{};
  timespec* limit = nullptr;
  if (deadline) {
    ts.tv_sec = deadline->count();
    limit = &ts;
  }
  while (sigtimedwait(&set, nullptr, limit) < 0 && errno == EINTR) {
  }
}

void add_responder(CLI::App& app, Context& ctx, std::function<int()>& action) {
  auto* responder = app.add_subcommand("responder", "Hybrid CRL-backed OCSP responder");
  responder->require_subcommand(1);
  auto a = std::make_shared<ServeArgs>();
  auto* serve = responder->add_subcommand("serve", "Serve OCSP and the CRL over HTTP");
  serve->add_option("--listen", a->listen, "Listen address (config: listen)");
  serve->add_option("--port", a->port, "Port, 0 picks one (config: port)");
  serve->add_option("--crl-source", a->crl_source, "CRL URL or file (config: crl_source)");
  serve->add_option("--issuer-cert", a->issuer, "Issuer certificate (config: issuer_cert)");
  serve->add_option("--signing-key", a->key, "Response signing key, PEM (config: signing_key)");
  serve->add_option("--signer-cert", a->signer, "Delegated signer certificate (config: signer_cert)");
  serve->add_option("--refresh-interval", a->refresh, "CRL refresh interval, e.g. 1h");
  serve->add_option("--response-validity", a->validity, "nextUpdate - thisUpdate, e.g. 7d");
  serve->add_option("--for", a->run_for, "Stop after this long instead of waiting for a signal");
  serve->callback([&, a] {
    action = [&, a] {
      KeyValueConfig cfg = ctx.config;
      auto set = [&](const std::string& key, const std::string& v) {
        if (!v.empty()) cfg.set(key, v);
      };
      set("listen", a->listen);
      if (a->port >= 0) cfg.set("port", std::to_string(a->port));
      set("crl_source", a->crl_source);
      set("issuer_cert", a->issuer);
      set("signing_key", a->key);
      set("signer_cert", a->signer);
      set("refresh_interval", a->refresh);
      set("response_validity", a->validity);
      ResponderConfig rc = load_responder_config(cfg);
      auto source = make_crl_source(rc.crl_source);
      auto hybrid = std::make_shared<HybridResponder>(rc, std::move(source));

      // Block before any thread starts so the signals reach only sigtimedwait.
      sigset_t set_mask;
      sigemptyset(&set_mask);
      sigaddset(&set_mask, SIGINT);
      sigaddset(&set_mask, SIGTERM);
      sigset_t old;
      pthread_sigmask(SIG_BLOCK, &set_mask, &old);
      std::ostream& log = ctx.err;
      ResponderService service(hybrid, utc_now, [&log](const std::string& m) { log << m << std::endl; });
      service.start();
      ctx.out << "serving " << service.ocsp_url() << '\n' << std::flush;
      std::optional<Seconds> deadline;
      if (!a->run_for.empty()) deadline = parse_duration(a->run_for);
      wait_for_shutdown(deadline);
      service.stop();
      pthread_sigmask(SIG_SETMASK, &old, nullptr);
      return 0;
    };
  });
}

// ---- cache ----

struct CacheArgs {
  std::string db, cert, issuer, serial, out;
  std::vector<std::string> anchors;
};

void add_cache(CLI::App& app, Context& ctx, std::function<int()>& action) {
  auto* cache = app.add_subcommand("cache", "Persistent OCSP staple cache");
  cache->require_subcommand(1);
  auto a = std::make_shared<CacheArgs>();
  auto common = [&](CLI::App* sc) {
    sc->add_option("--db", a->db, "Cache store file (config: cache.db)");
    sc->add_option("--anchor", a->anchors, "Trusted OCSP signer root; repeatable");
  };
  auto open = [&ctx, a] {
    return std::make_unique<StapleCache>(ctx.pick(a->db, "cache.db", "--db"), load_certs(a->anchors));
  };

  auto* fetch = cache->add_subcommand("fetch", "Look up or fetch the staple for a certificate");
  common(fetch);
  fetch->add_option("--cert", a->cert, "Certificate")->required();
  fetch->add_option("--issuer", a->issuer, "Issuer certificate")->required();
  fetch->callback([&, a, open] {
    action = [&, a, open] {
      auto c = open();
      HttpTransport http;
      auto cert = load_certificate(slurp(a->cert));
      auto issuer = load_certificate(slurp(a->issuer));
      auto row = c->lookup_or_fetch(cert.raw_der, issuer.raw_der, ctx.now(), http);
      ctx.out << "ID: " << row.id << " serial_number: " << row.serial_number << " cert_status: " << row.cert_status
              << " next_update: " << row.next_update << '\n';
      return 0;
    };
  });

  auto* staple = cache->add_subcommand("staple", "Write the cached DER response for a serial");
  common(staple);
  staple->add_option("--serial", a->serial, "Serial number, decimal as in the cache")->required();
  staple->add_option("--out", a->out, "Output file; base64 on stdout when omitted");
  staple->callback([&, a, open] {
    action = [&, a, open] {
      auto c = open();
      auto s = c->get_staple(SerialNumber::from_decimal(a->serial), ctx.now());
      if (s.stale) ctx.err << "warning: staple is stale (next_update " << s.entry.next_update << ")\n";
      if (a->out.empty()) ctx.out << base64_encode(s.response) << '\n';
      else spit(a->out, s.response);
      return 0;
    };
  });

  auto* maintain = cache->add_subcommand("maintain", "Refetch rows within seven days of next_update");
  common(maintain);
  maintain->callback([&, a, open] {
    action = [&, a, open] {
      auto c = open();
      HttpTransport http;
      auto report = c->maintain(ctx.now(), http, &ctx.out);
      return report.failed.empty() ? 0 : 1;
    };
  });

  auto* exp = cache->add_subcommand("export", "Dump every row");
  common(exp);
  exp->callback([&, a, open] {
    action = [&, a, open] {
      ctx.out << open()->export_table();
      return 0;
    };
  });
}

// ---- sc ----

struct ScArgs {
  std::string statuses, ca_dir, key, name = "sc-0", out, file, cert;
  std::uint64_t bits = 0, index = 0;
};

std::vector<bool> parse_status_text(const std::string& text) {
  std::vector<bool> out;
  for (char ch : text) {
    if (ch == '0') out.push_back(false);
    else if (ch == '1') out.push_back(true);
    else if (!std::isspace(static_cast<unsigned char>(ch)))
      fail(Errc::InvalidArgument, std::string("status file may only hold 0, 1 and whitespace, found '") + ch + "'");
  }
  return out;
}

void add_sc(CLI::App& app, Context& ctx, std::function<int()>& action) {
  auto* sc = app.add_subcommand("sc", "Signed collections: revocation bitmaps under one signature");
  sc->require_subcommand(1);
  auto a = std::make_shared<ScArgs>();

  auto* build = sc->add_subcommand("build", "Sign a bitmap of statuses");
  auto* src = build->add_option("--statuses", a->statuses, "File of 0 (valid) / 1 (revoked) characters");
  auto* from_ca = build->add_option("--ca", a->ca_dir, "Take statuses from a CA directory, in serial order");
  src->excludes(from_ca);
  build->add_option("--key", a->key, "Signing key PEM (default: the CA root key)");
  build->add_option("--name", a->name, "Collection name");
  build->add_option("--bits", a->bits, "Bitmap size (default: number of statuses)");
  build->add_option("--out", a->out, "Collection file")->required();
  build->callback([&, a] {
    action = [&, a] {
      std::vector<bool> statuses;
      std::optional<SigningKey> key;
      if (!a->ca_dir.empty()) {
        auto authority = TestAuthority::load(a->ca_dir);
        CollectionAssignment assign(a->name, a->bits ? a->bits : kDefaultBitCount);
        for (const auto& [serial, cert] : authority.issued()) {
          auto [name, idx] = assign.assign_index(serial);
          if (statuses.size() <= idx) statuses.resize(idx + 1);
          statuses[idx] = authority.revoked().count(serial) != 0;
        }
        if (a->key.empty()) key = authority.root_key();
      } else if (!a->statuses.empty()) {
        statuses = parse_status_text(as_text(slurp(a->statuses)));
      } else {
        throw CLI::RequiredError("--statuses or --ca");
      }
      if (!a->key.empty()) key = SigningKey::from_pem(as_text(slurp(a->key)));
      if (!key) throw CLI::RequiredError("--key");
      auto coll = build_collection(a->name, statuses, ctx.now(), *key,
                                   a->bits ? std::optional(a->bits) : std::nullopt);
      spit(a->out, coll.to_file());
      ctx.out << describe_collection(coll);
      return 0;
    };
  });

  auto* check = sc->add_subcommand("check", "Status bit at an index");
  check->add_option("--file", a->file, "Collection file")->required();
  check->add_option("--index", a->index, "Bit index")->required();
  check->callback([&, a] {
    action = [&, a] {
      auto coll = SignedCollection::from_file(slurp(a->file));
      ctx.out << bit_status_name(status_at(coll, a->index)) << '\n';
      return 0;
    };
  });

  auto* verify = sc->add_subcommand("verify", "Check the collection signature");
  verify->add_option("--file", a->file, "Collection file")->required();
  verify->add_option("--cert", a->cert, "Certificate of the signer")->required();
  verify->callback([&, a] {
    action = [&, a] {
      auto coll = SignedCollection::from_file(slurp(a->file));
      auto cert = load_certificate(slurp(a->cert));
      bool ok = verify_collection(coll, cert.public_key_info);
      ctx.out << (ok ? "signature OK" : "signature INVALID") << '\n';
      return ok ? 0 : 1;
    };
  });
}

// ---- sim ----

struct SimArgs {
  std::string mode = "stapled", script, advance = "8d";
  std::size_t clients = 100, certs = 0;
  std::uint64_t seed = 1;
  double rtt = 0.029;
  bool tamper = false;
};

void add_sim(CLI::App& app, Context& ctx, std::function<int()>& action) {
  auto* sim = app.add_subcommand("sim", "DLMS client/server handshake simulator");
  sim->require_subcommand(1);
  auto a = std::make_shared<SimArgs>();

  auto* run = sim->add_subcommand("run", "Run n handshakes, or a scenario script");
  run->add_option("--mode", a->mode, "stapled | direct")->check(CLI::IsMember({"stapled", "direct"}));
  run->add_option("-n,--clients", a->clients, "Number of clients");
  run->add_option("--certs", a->certs, "Distinct certificates shared by the clients (0: one each)");
  run->add_option("--seed", a->seed, "Simulation seed");
  run->add_option("--rtt", a->rtt, "Modeled link round trip, seconds");
  run->add_option("--script", a->script, "Scenario script file");
  run->callback([&, a] {
    action = [&, a] {
      if (!a->script.empty()) {
        auto result = run_script(as_text(slurp(a->script)));
        for (const auto& line : result.log) ctx.out << line << '\n';
        ctx.out << result.stats.to_table() << result.stats.summary() << '\n';
        for (const auto& f : result.failed_expectations) ctx.err << "expectation failed: " << f << '\n';
        return result.ok() ? 0 : 1;
      }
      ScenarioOptions opts;
      opts.n_clients = a->clients;
      opts.distinct_certs = a->certs;
      opts.mode = *mode_from_name(a->mode);
      opts.sim.seed = a->seed;
      opts.sim.link_rtt_seconds = a->rtt;
      auto stats = run_scenario(opts);
      ctx.out << stats.to_table() << stats.summary() << '\n';
      return 0;
    };
  });

  auto* replay = sim->add_subcommand("replay", "Replay a captured GOOD staple after revocation");
  replay->add_option("--advance", a->advance, "Clock advance after the revocation, e.g. 8d");
  replay->add_flag("--tamper", a->tamper, "Flip a byte of the captured staple");
  replay->add_option("--seed", a->seed, "Simulation seed");
  replay->callback([&, a] {
    action = [&, a] {
      ReplayOptions opts;
      opts.seed = a->seed;
      opts.advance = parse_duration(a->advance);
      opts.tamper = a->tamper;
      auto outcome = replay_attack_scenario(opts);
      ctx.out << outcome.verdict();
      if (!outcome.detail.empty()) ctx.out << ' ' << outcome.detail;
      ctx.out << '\n';
      return 0;
    };
  });
}

// ---- bench ----

struct BenchArgs {
  std::string url, issuer, report;
  std::vector<std::string> certs;
  std::size_t requests = 1000, workers = 1, local = 0;
  std::uint64_t seed = 1;
  bool nonce = false, use_local = false;
};

void add_bench(CLI::App& app, Context& ctx, std::function<int()>& action) {
  auto* bench = app.add_subcommand("bench", "Measure the responder");
  bench->require_subcommand(1);
  auto a = std::make_shared<BenchArgs>();
  auto target_opts = [&](CLI::App* sc) {
    sc->add_option("--url", a->url, "OCSP endpoint (config: bench.url)");
    sc->add_option("--issuer", a->issuer, "Issuer certificate");
    sc->add_option("--cert", a->certs, "Certificate to query; repeatable");
    auto* local = sc->add_option("--local", a->local,
                                 "Serve a throwaway responder with this many revoked entries and measure it");
    local->excludes("--url");
    sc->add_option("--seed", a->seed, "Seed of the --local CA");
    sc->add_flag("--nonce", a->nonce, "Send a 16-byte nonce");
  };
  // The local server must outlive the measurement.
  auto resolve = [&ctx, a](std::unique_ptr<LocalBenchServer>& local) {
    if (a->local > 0) {
      local = std::make_unique<LocalBenchServer>(a->local, a->seed);
      return local->target();
    }
    BenchTarget t;
    t.ocsp_url = ctx.pick(a->url, "bench.url", "--url or --local");
    if (a->issuer.empty() || a->certs.empty()) throw CLI::RequiredError("--issuer and --cert");
    t.issuer = load_certificate(slurp(a->issuer));
    t.subjects = load_certs(a->certs);
    return t;
  };

  auto* req = bench->add_subcommand("requests", "Time n verified OCSP request/response cycles");
  target_opts(req);
  req->add_option("-n,--requests", a->requests, "Number of requests")->check(CLI::PositiveNumber);
  req->add_option("--workers", a->workers, "Parallel request loops")->check(CLI::PositiveNumber);
  req->add_option("--report", a->report, "Append a JSON line here");
  req->callback([&, a, resolve] {
    action = [&, a, resolve] {
      std::unique_ptr<LocalBenchServer> local;
      BenchTarget target = resolve(local);
      BenchOptions opts;
      opts.requests = a->requests;
      opts.workers = a->workers;
      opts.with_nonce = a->nonce;
      auto r = bench_requests(target, opts);
      ctx.out << bench_report_line(r) << '\n';
      if (!a->report.empty()) {
        std::ofstream rep(a->report, std::ios::app);
        if (!rep) fail(Errc::Io, "cannot write " + a->report);
        write_bench_report(rep, r);
      }
      if (r.aborted) {
        ctx.err << "aborted: " << r.failures << " failures, first: " << r.first_error << '\n';
        return 1;
      }
      return 0;
    };
  });

  auto* frame = bench->add_subcommand("frame", "Byte size of one request/response cycle");
  target_opts(frame);
  frame->callback([&, a, resolve] {
    action = [&, a, resolve] {
      std::unique_ptr<LocalBenchServer> local;
      BenchTarget target = resolve(local);
      HttpTransport http;
      // With --local, a good certificate: the last subjects are never revoked.
      const CertMeta& cert = local ? target.subjects.back() : target.subjects.front();
      std::optional<Bytes> nonce;
      if (a->nonce) nonce = random_bytes(16);
      ctx.out << frame_report_line(measure_frame(http, target.ocsp_url, cert, target.issuer, nonce)) << '\n';
      return 0;
    };
  });
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Context ctx{out, err, {}, {}, {}};
  std::function<int()> action;

  CLI::App app{"staplegrid: OCSP stapling toolkit for DLMS smart-meter PKI"};
  app.name("staplegrid");
  app.require_subcommand(1);
  app.add_option("--config", ctx.config_path, "key = value config file; STAPLEGRID_<KEY> overrides");
  app.add_option("--now", ctx.now_text, "Pretend the time is \"YYYY-MM-DD HH:MM:SS\" UTC");
  add_ca(app, ctx, action);
  add_responder(app, ctx, action);
  add_cache(app, ctx, action);
  add_sc(app, ctx, action);
  add_sim(app, ctx, action);
  add_bench(app, ctx, action);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
    ctx.config = ctx.config_path.empty() ? KeyValueConfig{} : KeyValueConfig::load(ctx.config_path);
    if (!ctx.now_text.empty()) {
      try {
        ctx.now();
      } catch (const Error& e) {
        throw CLI::ValidationError("--now", e.what());
      }
    }
    return action ? action() : 0;
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "staplegrid: " << e.what() << '\n';
    return 2;
  } catch (const Error& e) {
    err << "staplegrid: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << "staplegrid: " << e.what() << '\n';
    return 1;
  }
}

int run(int argc, char** argv, std::ostream& out, std::ostream& err) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(args, out, err);
}

}  // namespace staplegrid::cli
