# Generated by Django 6.0.1 on 2026-10-17 09:12

from django.db import migrations, models


class Migration(migrations.Migration):

    initial = True

    dependencies = [
    ]

    operations = [
        migrations.CreateModel(
            name='CompiledSet',
            fields=[
                ('id', models.BigAutoField(auto_created=True, primary_key=True, serialize=False, verbose_name='ID')),
                ('source_hash', models.CharField(db_index=True, help_text='sha256 of the automaton text and thickness override', max_length=64, unique=True)),
                ('source', models.TextField(help_text='BS automaton text as submitted')),
                ('q', models.PositiveIntegerField(help_text='Base of BS(1,q)')),
                ('thickness', models.PositiveIntegerField(blank=True, help_text='Thickness override; empty means the default bound', null=True)),
                ('status', models.CharField(choices=[('success', 'Success'), ('budget_exceeded', 'Budget Exceeded')], default='success', help_text='Outcome of the last compile', max_length=20)),
                ('dump', models.TextField(blank=True, help_text='PE-set dump (pe q=N header and minimal DFA)', null=True)),
                ('stats', models.JSONField(default=dict, help_text='Per-stage statistics of the compile pipeline')),
                ('error_message', models.TextField(blank=True, help_text='Budget error, if any', null=True)),
                ('created_at', models.DateTimeField(auto_now_add=True)),
                ('updated_at', models.DateTimeField(auto_now=True)),
            ],
            options={
                'verbose_name': 'Compiled Set',
                'verbose_name_plural': 'Compiled Sets',
                'db_table': 'compiled_sets',
            },
        ),
    ]
