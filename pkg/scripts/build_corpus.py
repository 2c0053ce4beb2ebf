"""Regenerate the bundled labelled corpus under src/iacsmell/data/corpus.

Each entry lists the rule ids a reviewer expects and the line of each smell.
Clean entries carry no expectations.
"""

from __future__ import annotations

import json
import textwrap
from pathlib import Path

ROOT = Path(__file__).resolve().parents[1] / "src" / "iacsmell" / "data" / "corpus"

ICM = "insecure-configuration-management"
IDM = "insecure-dependency-management"
IIH = "insecure-input-handling"
OD = "outdated-dependencies"
PT = "path-traversal"
CI = "command-injection"
CODE = "code-injection"
OSV = "outdated-software-version"
NAME = "inadequate-naming-convention"
SIE = "sensitive-information-exposure"

GOLDEN = "golden playbook task {}"
FIXED = "remediated counterpart of golden playbook task {}"
HAND = "hand-written"

# (id, tool, filename, text, [(rule, line)], provenance)
ENTRIES = [
    # ---------------------------------------------------------------- ansible
    ("ans-01", "ansible", "ssh_root.yml", """
        - name: Misconfigured SSH service
          lineinfile:
            path: /etc/ssh/sshd_config
            regexp: '^PermitRootLogin'
            line: 'PermitRootLogin yes'
        """, [(ICM, 5)], GOLDEN.format(1)),
    ("ans-02", "ansible", "apt_unpinned.yml", """
        - name: Install a package without checking version
          apt:
            name: "apache2"
            state: present
        """, [(IDM, 3)], GOLDEN.format(2)),
    ("ans-03", "ansible", "arith_input.yml", """
        - name: Process user-supplied number without validation
          shell: "echo $(( {{ user_number }} + 1 ))"
        """, [(IIH, 2)], GOLDEN.format(3)),
    ("ans-04", "ansible", "openssl_old.yml", """
        - name: Install package with outdated dependencies
          apt:
            name: "openssl"
            version: "1.0.1"
            state: present
        """, [(OD, 4)], GOLDEN.format(4)),
    ("ans-05", "ansible", "copy_var_src.yml", """
        - name: Copy file with potential path traversal
          copy:
            src: "{{ file_path }}"
            dest: /etc/securefile
        """, [(PT, 3)], GOLDEN.format(5)),
    ("ans-06", "ansible", "apt_action.yml", """
        - name: Run package update command from input
          command: "apt-get {{ action }}"
        """, [(CI, 2)], GOLDEN.format(6)),
    ("ans-07", "ansible", "pipe_eval.yml", """
        - name: Evaluate user-provided Python expression (vulnerable)
          vars:
            user_expression: "os.system('rm -rf /')"
          set_fact:
            result: "{{ lookup('pipe', 'python3 -c \\"' + user_expression + '\\"') }}"
        """, [(CODE, 5)], GOLDEN.format(7)),
    ("ans-08", "ansible", "python27.yml", """
        - name: Install outdated version of Python
          apt:
            name: "python2.7"
            state: present
        """, [(OSV, 3)], GOLDEN.format(8)),
    ("ans-09", "ansible", "vague_file.yml", """
        - name: Create file with vague name
          file:
            path: /etc/doitnow.txt
            state: touch
        """, [(NAME, 3)], GOLDEN.format(9)),
    ("ans-10", "ansible", "aws_plain.yml", """
        - name: Store AWS credentials in plain text file
          copy:
            content: |
              [default]
              aws_access_key_id = {{ aws_access_key_id }}
              aws_secret_access_key = {{ aws_secret_access_key }}
            dest: /etc/aws/credentials
            owner: root
            mode: '0600'
        """, [(SIE, 6)], GOLDEN.format(10)),
    ("ans-11", "ansible", "ssh_hardened.yml", """
        - name: Harden SSH service
          lineinfile:
            path: /etc/ssh/sshd_config
            regexp: '^PermitRootLogin'
            line: 'PermitRootLogin no'
        """, [], FIXED.format(1)),
    ("ans-12", "ansible", "apt_pinned.yml", """
        - name: Install a pinned package
          apt:
            name: "apache2"
            version: "2.4.58-1"
            state: present
        """, [], FIXED.format(2)),
    ("ans-13", "ansible", "arith_int.yml", """
        - name: Process user-supplied number as an integer
          shell: "echo $(( {{ user_number | int }} + 1 ))"
        """, [], FIXED.format(3)),
    ("ans-14", "ansible", "openssl_new.yml", """
        - name: Install a maintained openssl release
          apt:
            name: "openssl"
            version: "3.0.13"
            state: present
        """, [], FIXED.format(4)),
    ("ans-15", "ansible", "copy_static.yml", """
        - name: Copy file from a fixed location
          copy:
            src: files/securefile.conf
            dest: /etc/securefile
        """, [], FIXED.format(5)),
    ("ans-16", "ansible", "apt_action_quoted.yml", """
        - name: Run package update command from input
          command: "apt-get {{ action | quote }}"
        """, [], FIXED.format(6)),
    ("ans-17", "ansible", "record_expr.yml", """
        - name: Record the user-provided expression without evaluating it
          vars:
            user_expression: "os.system('rm -rf /')"
          set_fact:
            recorded_expression: "{{ user_expression | quote }}"
        """, [], FIXED.format(7)),
    ("ans-18", "ansible", "python311.yml", """
        - name: Install a maintained version of Python
          apt:
            name: "python3.11"
            version: "3.11.8-1"
            state: present
        """, [], FIXED.format(8)),
    ("ans-19", "ansible", "marker_file.yml", """
        - name: Create marker file with a descriptive name
          file:
            path: /etc/provisioning_complete.txt
            state: touch
        """, [], FIXED.format(9)),
    ("ans-20", "ansible", "aws_vault.yml", """
        - name: Install AWS credentials from an encrypted file
          copy:
            src: files/aws_credentials.vault
            dest: /etc/aws/credentials
            decrypt: yes
            owner: root
            mode: '0600'
          no_log: true
        """, [], FIXED.format(10)),
    # ---------------------------------------------------------------- saltstack
    ("salt-01", "saltstack", "sshd_root.sls", """
        sshd_config_root_login:
          file.replace:
            - name: /etc/ssh/sshd_config
            - pattern: '^#?PermitRootLogin.*'
            - repl: 'PermitRootLogin yes'
        """, [(ICM, 5)], HAND),
    ("salt-02", "saltstack", "openssl_old.sls", """
        openssl:
          pkg.installed:
            - version: 1.0.1
        """, [(OD, 3)], HAND),
    ("salt-03", "saltstack", "restart_pillar.sls", """
        restart_service:
          cmd.run:
            - name: "systemctl restart {{ pillar['service'] }}"
        """, [(CI, 3)], HAND),
    ("salt-04", "saltstack", "pillar_source.sls", """
        app_config:
          file.managed:
            - name: /srv/app/config.yml
            - source: "salt://files/{{ pillar['filename'] }}"
        """, [(PT, 4)], HAND),
    ("salt-05", "saltstack", "eval_pillar.sls", """
        eval_user_code:
          cmd.run:
            - name: "python3 -c '{{ pillar['code'] }}'"
        """, [(CODE, 3)], HAND),
    ("salt-06", "saltstack", "sshd_hardened.sls", """
        sshd_config_root_login:
          file.replace:
            - name: /etc/ssh/sshd_config
            - pattern: '^#?PermitRootLogin.*'
            - repl: 'PermitRootLogin no'
        """, [], HAND),
    ("salt-07", "saltstack", "openssl_new.sls", """
        openssl:
          pkg.installed:
            - version: 3.0.13
        """, [], HAND),
    ("salt-08", "saltstack", "restart_fixed.sls", """
        restart_service:
          cmd.run:
            - name: "systemctl restart nginx"
        """, [], HAND),
    ("salt-09", "saltstack", "static_source.sls", """
        app_config:
          file.managed:
            - name: /srv/app/config.yml
            - source: salt://files/config.yml
        """, [], HAND),
    ("salt-10", "saltstack", "pinned_pkg.sls", """
        nginx:
          pkg.installed:
            - version: 1.24.0
        """, [], HAND),
    # ---------------------------------------------------------------- puppet
    ("pup-01", "puppet", "permit_root.pp", """
        file_line { 'permit_root':
          path => '/etc/ssh/sshd_config',
          line => 'PermitRootLogin yes',
        }
        """, [(ICM, 3)], HAND),
    ("pup-02", "puppet", "openssl_old.pp", """
        package { 'openssl':
          ensure => '1.0.1',
        }
        """, [(OD, 2)], HAND),
    ("pup-03", "puppet", "exec_var.pp", """
        exec { 'restart_service':
          command => "systemctl restart ${service_name}",
          path    => '/usr/bin',
        }
        """, [(CI, 2)], HAND),
    ("pup-04", "puppet", "db_password.pp", """
        class profile::db {
          $db_password = 'SuperSecret123'
        }
        """, [(SIE, 2)], HAND),
    ("pup-05", "puppet", "ruby_eval.pp", """
        exec { 'eval_code':
          command => "ruby -e '${user_code}'",
          path    => '/usr/bin',
        }
        """, [(CODE, 2)], HAND),
    ("pup-06", "puppet", "no_root.pp", """
        file_line { 'permit_root':
          path => '/etc/ssh/sshd_config',
          line => 'PermitRootLogin no',
        }
        """, [], HAND),
    ("pup-07", "puppet", "openssl_new.pp", """
        package { 'openssl':
          ensure => '3.0.13',
        }
        """, [], HAND),
    ("pup-08", "puppet", "exec_fixed.pp", """
        exec { 'restart_service':
          command => '/usr/bin/systemctl restart nginx',
          path    => '/usr/bin',
        }
        """, [], HAND),
    ("pup-09", "puppet", "db_lookup.pp", """
        class profile::db {
          $db_password = lookup('profile::db::password')
        }
        """, [], HAND),
    ("pup-10", "puppet", "apache_pinned.pp", """
        package { 'apache2':
          ensure => '2.4.58',
        }
        """, [], HAND),
    # ---------------------------------------------------------------- terraform
    ("tf-01", "terraform", "module_unpinned.tf", """
        module "net" {
          source = "git::https://example.com/net.git"
        }
        """, [(IDM, 2)], HAND),
    ("tf-02", "terraform", "local_exec.tf", """
        resource "null_resource" "run" {
          provisioner "local-exec" {
            command = "deploy.sh ${var.environment}"
          }
        }
        """, [(CI, 3)], HAND),
    ("tf-03", "terraform", "default_password.tf", """
        variable "db_password" {
          default = "hunter2"
        }
        """, [(SIE, 2)], HAND),
    ("tf-04", "terraform", "var_filename.tf", """
        resource "local_file" "cfg" {
          filename = "/etc/app/${var.config_name}"
          content  = "hello"
        }
        """, [(PT, 2)], HAND),
    ("tf-05", "terraform", "module_pinned.tf", """
        module "vpc" {
          source  = "terraform-aws-modules/vpc/aws"
          version = "5.1.2"
        }
        """, [], HAND),
    ("tf-06", "terraform", "local_exec_static.tf", """
        resource "null_resource" "run" {
          provisioner "local-exec" {
            command = "deploy.sh production"
          }
        }
        """, [], HAND),
    ("tf-07", "terraform", "sensitive_var.tf", """
        variable "db_password" {
          type      = string
          sensitive = true
        }
        """, [], HAND),
    ("tf-08", "terraform", "static_filename.tf", """
        resource "local_file" "cfg" {
          filename = "/etc/app/settings.conf"
          content  = "hello"
        }
        """, [], HAND),
]


def main() -> None:
    lines = []
    for entry_id, tool, name, text, expected, provenance in ENTRIES:
        rel = f"{tool}/{entry_id}_{name}"
        target = ROOT / rel
        target.parent.mkdir(parents=True, exist_ok=True)
        target.write_text(textwrap.dedent(text).lstrip("\n"), encoding="utf-8")
        lines.append(json.dumps({
            "id": entry_id,
            "tool": tool,
            "snippet": rel,
            "expected": [{"rule_id": r, "line": n} for r, n in expected],
            "provenance": provenance,
        }))
    (ROOT / "manifest.jsonl").write_text("\n".join(lines) + "\n", encoding="utf-8")


if __name__ == "__main__":
    main()
