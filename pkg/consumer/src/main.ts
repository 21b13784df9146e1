#!/usr/bin/env node
/**
 * CLI: read trigger frames from stdin, a TCP endpoint or a device path,
 * flash/beep on every beat and emit a JSON-lines session report.
 *
 *   beatstream-consumer [--endpoint stdin|tcp:HOST:PORT|PATH]
 *                       [--report PATH] [--loopback] [--quiet]
 */

import { createWriteStream } from 'node:fs';

import { listen } from './listen.js';

function parseArgs(argv: string[]) {
  const args = {
    endpoint: 'stdin',
    report: null as string | null,
    loopback: false,
    quiet: false,
  };
  for (let i = 0; i < argv.length; i += 1) {
    const arg = argv[i];
    if (arg === '--endpoint') args.endpoint = argv[++i];
    else if (arg === '--report') args.report = argv[++i];
    else if (arg === '--loopback') args.loopback = true;
    else if (arg === '--quiet') args.quiet = true;
    else {
      process.stderr.write(`unknown argument: ${arg}\n`);
      process.exit(2);
    }
  }
  return args;
}

async function main() {
  const args = parseArgs(process.argv.slice(2));
  const sink = args.report ? createWriteStream(args.report) : process.stdout;

  try {
    const report = await listen(args.endpoint, {
      loopback: args.loopback,
      report: (line) => sink.write(line + '\n'),
      onTrigger: (t) => {
        if (!args.quiet) {
          // console "flash": bell plus an inverse-video beat line
          process.stderr.write(
            `\x1b[7m BEAT ${t.seq} @ ${t.sender_timestamp_ms} ms \x1b[0m\n`,
          );
        }
      },
    });
    process.stderr.write(
      `session: received=${report.received} gaps=${report.gaps} ` +
      `malformed=${report.malformed}\n`,
    );
    process.exit(report.endpoint_closed ? 1 : 0);
  } catch (err) {
    process.stderr.write(`error: ${(err as Error).message}\n`);
    process.exit(3);
  }
}

void main();
