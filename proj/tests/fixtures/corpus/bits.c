struct packed {
	unsigned kind : 3;
	unsigned count : 5;
	int delta : 4;
	unsigned rest : 20;
};

int popcount(unsigned v) {
	int n = 0;

	while (v) {
		n = n + (v & 1);
		v = v >> 1;
	}
	return n;
}

int main(void) {
	struct packed p;
	unsigned x = 1;
	int i;

	for (i = 0; i < 12; i++) {
		p.kind = i;
		p.count = i * 3;
		p.delta = i - 6;
		p.rest = x;
		print_int(p.kind);
		putchar(',');
		print_int(p.count);
		putchar(',');
		print_int(p.delta);
		putchar(',');
		print_int(popcount(p.rest));
		putchar('\n');
		x = (x << 1) | (x ^ i);
	}
	print_int(~5 & 0xff);
	putchar('\n');
	return 0;
}
