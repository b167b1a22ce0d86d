struct point {
	int x, y;
};

struct rect {
	struct point lo, hi;
	struct rect *next;
};

struct rect pool[4];

int area(struct rect *r) {
	return (r->hi.x - r->lo.x) * (r->hi.y - r->lo.y);
}

int main(void) {
	struct rect *list = 0;
	struct rect *r;
	int i, total = 0;

	for (i = 0; i < 4; i++) {
		r = &pool[i];
		r->lo.x = i;
		r->lo.y = -i;
		r->hi.x = 2 * i + 3;
		r->hi.y = i + 1;
		r->next = list;
		list = r;
	}
	for (r = list; r; r = r->next) {
		print_int(area(r));
		putchar(' ');
		total = total + area(r);
	}
	print_int(total);
	putchar('\n');
	return 0;
}
